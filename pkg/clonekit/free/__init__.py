__all__ = ["base", "terms", "derivations", "clusters", "search", "equality", "algebra"]
