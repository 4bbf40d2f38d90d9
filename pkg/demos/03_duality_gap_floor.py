"""Why the duality gap of an l0 problem can stay positive.

For square loss the dual function is the conjugate of the convex envelope of
the primal, so max D equals the minimum of the envelope, not of P itself. On
a one-dimensional problem both can be tabulated on a grid.
"""
import numpy as np

from l0pd import Hyperparams, InnerConfig, InverseTimeStep, LossModel, ProblemData, dual_ascent_solve, oracle_solve
from l0pd.duality import dual_from_primal, dual_objective, penalty_value

square = LossModel.square()

# one feature whose signal is too weak to pay lambda0, so beta* = 0; the envelope still gains from it
data = ProblemData([[1.0]], [0.75])
hp = Hyperparams(lambda0=0.25, lambda1=0.0, lambda2=0.1)

b = np.linspace(-2.0, 2.0, 40_001)
loss = 0.5 * (0.75 - b) ** 2
primal = loss + np.array([penalty_value(np.array([v]), hp) for v in b])

# closed form of the envelope penalty: linear inside sqrt(lambda0 / lambda2), exact outside
knee = np.sqrt(hp.lambda0 / hp.lambda2)
slope = hp.lambda1 + 2.0 * np.sqrt(hp.lambda0 * hp.lambda2)
envelope = loss + np.where(np.abs(b) <= knee, slope * np.abs(b), hp.lambda1 * np.abs(b) + hp.lambda2 * b * b + hp.lambda0)

best = oracle_solve(data, hp)
print("min P        (oracle) = %.6f at beta = %s" % (best.objective, best.beta))
print("min P        (grid)   = %.6f" % primal.min())
print("min envelope (grid)   = %.6f" % envelope.min())

# maximize D directly and compare
res = dual_ascent_solve(data, hp, square, InnerConfig(step=InverseTimeStep(1.0), max_iters=20_000))
print("max D        (ascent) = %.6f" % dual_objective(res.alpha, data, hp, square))

# the gap certified through the primal optimum cannot go below P* - max D
alpha = dual_from_primal(best.beta, data, square)
print("gap at the oracle point: %.6f" % (best.objective - dual_objective(alpha, data, hp, square)))
print("floor P* - max D:        %.6f" % (best.objective - envelope.min()))
