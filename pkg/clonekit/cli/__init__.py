__all__ = ["surface", "bundle", "main"]
