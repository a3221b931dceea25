from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..domain import DomainKind, NoiseMode, UtilityKind

# utility form -> domains its forward solver covers
SUPPORTED_PAIRS = {
    UtilityKind.QUAD: (DomainKind.CONT_KNAPSACK, DomainKind.POLYTOPE, DomainKind.BIN_KNAPSACK),
    UtilityKind.CES: (DomainKind.EQ_KNAPSACK,),
    UtilityKind.BILINEAR: (DomainKind.CONT_KNAPSACK,),
    UtilityKind.COBB: (DomainKind.CONT_KNAPSACK,),
}


class GenConfig(BaseModel):
    """Size, kind and seed of a batch of random instance streams."""

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    n: int = Field(50, ge=1)
    m: int = Field(10, ge=1)
    T: int = Field(500, ge=1)
    instance_count: int = Field(50, ge=1)
    domain: DomainKind = DomainKind.CONT_KNAPSACK
    utility: UtilityKind = UtilityKind.QUAD
    seed: int = Field(0, ge=0)
    noise_mode: NoiseMode = NoiseMode.PERFECT
    interior: bool = False

    @model_validator(mode="after")
    def check_combination(self):
        if self.utility is UtilityKind.CUSTOM_1D or self.domain is DomainKind.INTERVAL:
            raise ValueError("1-D custom streams are scripted; use the 'obscuring' scenario")
        if self.domain not in SUPPORTED_PAIRS[self.utility]:
            raise ValueError(f"utility '{self.utility.value}' has no forward solver on domain '{self.domain.value}'")
        if self.noise_mode is NoiseMode.SUBOPTIMAL and self.domain is DomainKind.BIN_KNAPSACK:
            raise ValueError("suboptimal-feasible noise mixes actions and needs a convex domain")
        if self.utility is UtilityKind.COBB and self.noise_mode in (NoiseMode.SMALL, NoiseMode.LARGE):
            raise ValueError("additive noise can leave the positive orthant where Cobb-Douglas c(x) = -log x is undefined")
        if self.interior and (self.utility is not UtilityKind.QUAD or self.domain is not DomainKind.CONT_KNAPSACK):
            raise ValueError("interior streams are quadratic continuous-knapsack streams")
        return self
