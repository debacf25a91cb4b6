from cmps_tomo.utils.registry import Registry

# fn(samples, order, delta_tau, pencil) -> PoleEstimate
ESTIMATORS = Registry()
# fn(spec, grid, master_seed, trial, cfg) -> [(mean_rel, max_rel) per grid value]
BENCHMARKS = Registry()
