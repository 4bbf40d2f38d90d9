"""One feature, two identical samples: the smallest problem with a saddle point.

With x = (1, 1), y = (1, 1), lambda0 = 0.01, lambda1 = 0 and lambda2 = 0.5 the
minimizer is beta = 2/3 and the dual optimum is alpha = (-1/3, -1/3).
"""
import numpy as np

from l0pd import FixedStep, Hyperparams, InnerConfig, LossModel, ProblemData, inner_solve, oracle_solve
from l0pd.duality import dual_objective, eta, primal_objective

data = ProblemData([[1.0], [1.0]], [1.0, 1.0])
hp = Hyperparams(lambda0=0.01, lambda1=0.0, lambda2=0.5)
loss = LossModel.square()

# eta0 is the activity threshold on eta = -X'alpha / (2 lambda2)
print("eta0 =", hp.eta0)

# at alpha = 0, eta is zero and the link keeps the feature off
alpha0 = np.zeros(2)
print("eta(0) =", eta(alpha0, data, hp), " D(0) =", dual_objective(alpha0, data, hp, loss))

# plain dual ascent with a fixed step contracts towards the optimum geometrically
cfg = InnerConfig(step=FixedStep(0.5), gap_tol=1e-12, gap_change_tol=1e-300, max_iters=200)
res = inner_solve(data, hp, loss, cfg, primal_cd=False)
print(f"after {res.iterations} steps: beta = {res.beta[0]:.12f}, alpha = {res.alpha}, gap = {res.gap:.2e}")

# the exhaustive oracle agrees
best = oracle_solve(data, hp)
print("oracle support", best.support, "objective", best.objective)
print("P(beta) - P(oracle) =", primal_objective(res.beta, data, hp, loss) - best.objective)

# the gap trace, every 5th step
for t, gap, _ in res.trace[::5]:
    print(f"  t={t:3d}  gap={gap:.3e}")
