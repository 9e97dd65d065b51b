"""How far EFGM concordance reaches, next to a simple index mixture.

EFGM copulas built from symmetric Bernoulli laws top out at rho_S = 1/3,
while mixing independence and comonotonicity half and half already gives 1/2.
"""
from imcopula import (
    BernoulliVectorLaw,
    Comonotone,
    Independence,
    IndexDistribution,
    IndexMixedCopula,
    efgm_admissible,
    spearman_rho_pair,
    thetas_from_bernoulli,
)
from imcopula.efgm import EfgmParameters, efgm_concordance_range

for row in efgm_concordance_range([-1.0, -0.5, 0.0, 0.5, 1.0]):
    print(f"theta={row['theta']:+.1f}  rho_S={row['rho_s']:+.4f}  tau={row['tau']:+.4f}")

law = BernoulliVectorLaw.comonotone(3)
print("comonotone Bernoulli law in 3d ->", thetas_from_bernoulli(law).as_dict())

check = efgm_admissible(EfgmParameters.bivariate(1.5))
print(f"theta=1.5 admissible={check.admissible}, violating signs {check.witness}")

mix = IndexMixedCopula((Independence(2), Comonotone(2)), IndexDistribution.comonotone([0.5, 0.5], 2))
print(f"(Pi, M) half-half rho_S = {spearman_rho_pair(mix):.4f}")
