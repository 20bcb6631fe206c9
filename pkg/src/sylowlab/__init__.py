"""sylowlab: Sylow 2-subgroups of GL2(F_p), Vol'vachev's criteria over F_p(i),
and finite-evidence transfer checks for ultraproducts of finite groups."""

__version__ = "0.1.0"
