__all__ = ["variants", "normal_forms", "nbe", "witness", "set_model", "suite", "adequacy"]
