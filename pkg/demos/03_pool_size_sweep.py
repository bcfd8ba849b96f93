# %% [markdown]
# # How big should the candidate pool be?
#
# Sweep the number of candidates drawn per scope and record the test RMSE
# after a fixed budget of 10 nodes. The same sweep is available from the
# command line:
#
#     innet bench --config demos/configs/db1_inn.cfg --sweep pool_size=1,3,10,30

# %%
import numpy as np

from innet import TrainerConfig, normalize, split, synth_function, train

tr, te = split(synth_function(2400, seed=0, noise=0.5), 2000, 400, seed=0)
tr, norm = normalize(tr)
te = norm.apply(te)

print("pool  train_rmse  test_rmse  fallbacks")
for pool in (1, 3, 10, 30):
    train_rmse, test_rmse, fallbacks = [], [], []
    for seed in range(5):
        cfg = TrainerConfig.from_table("DB1", "inplus", seed=seed, pool_size=pool,
                                       tol=1e-4, max_nodes=10)
        _, trace = train(cfg, tr, te)
        train_rmse.append(trace.train_rmse)
        test_rmse.append(trace.test_rmse)
        fallbacks.append(sum(r.fallback_used for r in trace.records))
    print(f"{pool:4d}  {np.mean(train_rmse):.5f}     {np.mean(test_rmse):.5f}    {np.mean(fallbacks):.1f}")

# %% [markdown]
# Each trace row also records the selected candidate's ``cos2`` and the
# threshold in force, which shows how much of the residual every node removed.

# %%
_, trace = train(TrainerConfig.from_table("DB1", "inn", seed=0), tr, te)
for r in trace.records:
    print(f"node {r.node_index}: cos2={r.cos2:.3f}  need>={r.gamma * r.selected_score / r.cos2:.3f}  "
          f"rmse={r.residual_rmse:.4f}")
