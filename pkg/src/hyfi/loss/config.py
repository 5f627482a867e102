from pydantic import Field, model_validator

from hyfi.core.models import HyfiModel

__all__ = ["LossConfig"]


class LossConfig(HyfiModel):
    """Temperatures, edge-loss weight and the ablation switches of the objective."""

    tau_node: float = Field(default=0.5, gt=0.0)
    tau_edge: float = Field(default=0.5, gt=0.0)
    alpha: float = Field(default=1.0, ge=0.0)
    use_weak_positive: bool = True
    use_positive: bool = True
    use_weak_weight: bool = True
    use_edge_loss: bool = True

    @model_validator(mode="after")
    def _has_a_positive_term(self) -> "LossConfig":
        if not (self.use_weak_positive or self.use_positive):
            raise ValueError(
                "use_weak_positive and use_positive cannot both be false: every"
                " anchor would have an empty numerator"
            )
        return self

    @property
    def effective_alpha(self) -> float:
        return self.alpha if self.use_edge_loss else 0.0
