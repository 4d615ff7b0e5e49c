__all__ = ["config", "core", "presentations", "second_order", "free", "induction", "stlc", "cli"]
