__all__ = ["sorts", "terms", "clones", "laws", "elaborate", "codec", "search"]
