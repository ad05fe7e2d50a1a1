class GuardError(ValueError):
    """A desk-scale size guard was exceeded."""


class TypeFlipError(ValueError):
    """A bijection sent a star to a top (or a top to a star)."""


class NotSpecialError(ValueError):
    """An apartment bijection failed the special-bijection classification."""


class ReconstructionError(ValueError):
    """A stage of the reconstruction pipeline failed its verification."""

    def __init__(self, stage: str, message: str, witness=None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.witness = witness
