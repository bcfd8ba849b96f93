# %% [markdown]
# # INN, IN+ and IRW on the two-peak curve
#
# Setup of the DB1 row: 2000 training and 400 test samples of
# ``1/((x-.3)^2+.01) + 1/((x-.9)^2+.04) - 6``, scopes 1..200 with 10
# candidates each, target RMSE 0.05, at most 30 nodes. Averaged over 10 seeds.

# %%
import numpy as np

from innet import TrainerConfig, normalize, split, synth_function, train
from innet.metrics import kde
from innet.model import hidden_matrix

SEEDS = range(10)
curves = {alg: [] for alg in ("irw", "inn", "inplus")}
errors = {alg: [] for alg in curves}

for seed in SEEDS:
    tr, te = split(synth_function(2400, seed=seed), 2000, 400, seed=seed)
    tr, norm = normalize(tr)
    te = norm.apply(te)
    for alg in curves:
        # tol is lowered here so every curve runs the full 30 nodes
        cfg = TrainerConfig.from_table("DB1", alg, seed=seed, tol=1e-3, max_retries=1)
        model, trace = train(cfg, tr, te)
        curves[alg].append(trace.rmse_curve())
        errors[alg].append((hidden_matrix(model, te.X) @ model.beta - te.Y).ravel())

# %% Mean training RMSE per node count
mean = {alg: np.mean(np.array(c), axis=0) for alg, c in curves.items()}
print(" L    IRW      INN      IN+")
for L in (0, 1, 2, 3, 5, 10, 20, 30):
    print(f"{L:2d}  {mean['irw'][L]:.4f}   {mean['inn'][L]:.4f}   {mean['inplus'][L]:.4f}")

for alg, m in mean.items():
    hit = np.nonzero(m <= 0.05)[0]
    print(f"{alg:7s} reaches 0.05 at L = {hit[0] if hit.size else 'never (<= 30)'}")

# %% Error densities on the test split
for alg, errs in errors.items():
    est = kde(np.concatenate(errs))
    peak = est.grid[np.argmax(est.density)]
    print(f"{alg:7s} KDE bandwidth {est.bandwidth:.4f}, mode at {peak:+.4f}, "
          f"peak density {est.density.max():.2f}")

# %% Optional figure
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(1, 2, figsize=(9, 3.5))
    for alg, m in mean.items():
        ax[0].semilogy(m, label=alg)
        est = kde(np.concatenate(errors[alg]))
        ax[1].plot(est.grid, est.density, label=alg)
    ax[0].axhline(0.05, ls=":", c="k")
    ax[0].set(xlabel="hidden nodes", ylabel="training RMSE")
    ax[1].set(xlabel="test error", ylabel="density", xlim=(-0.3, 0.3))
    ax[0].legend()
    fig.tight_layout()
    fig.savefig("convergence_db1.png", dpi=120)
    print("wrote convergence_db1.png")
