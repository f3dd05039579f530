from .nonlocal_condition import NonlocalCondition, IntegralCondition, MultipointCondition
from .operators import ProblemOperators, etd2_weights
