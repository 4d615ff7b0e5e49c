__all__ = ["predicates", "harness", "relations"]
