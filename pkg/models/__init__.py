from .solution_field import SolutionField
