__all__ = ["syntax", "algebra"]
