__all__ = ["first_order", "derivations", "rewrite", "search", "tm_clone", "stock"]
