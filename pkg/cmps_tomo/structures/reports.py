import numpy as np

from .transfer import permutation_matrix


class BenchmarkReport(object):
    """
    Outcome of one grid point of a benchmark: success rates under the
    mean-error and max-error criteria over `trials` seeded trials.
    """

    def __init__(self, kind, grid_value, trials, success_rate_mean_criterion,
                 success_rate_max_criterion, error_quantiles=None, failures=0,
                 config=None):
        if trials < 1:
            raise ValueError("trials should be positive, got {}".format(trials))
        for rate in (success_rate_mean_criterion, success_rate_max_criterion):
            if not 0.0 <= rate <= 1.0:
                raise ValueError("success rates should lie in [0, 1], got {}".format(rate))
        self.kind = kind
        self.grid_value = float(grid_value)
        self.trials = int(trials)
        self.success_rate_mean_criterion = float(success_rate_mean_criterion)
        self.success_rate_max_criterion = float(success_rate_max_criterion)
        self.error_quantiles = dict(error_quantiles or {})
        self.failures = int(failures)
        self.config = dict(config or {})

    def as_dict(self):
        return {
            "kind": self.kind,
            "grid_value": self.grid_value,
            "trials": self.trials,
            "success_rate_mean_criterion": self.success_rate_mean_criterion,
            "success_rate_max_criterion": self.success_rate_max_criterion,
            "error_quantiles": self.error_quantiles,
            "failures": self.failures,
            "config": self.config,
        }

    def __repr__(self):
        return "{}(kind={}, grid_value={:.4g}, rate_mean={:.3f}, rate_max={:.3f})".format(
            self.__class__.__name__, self.kind, self.grid_value,
            self.success_rate_mean_criterion, self.success_rate_max_criterion,
        )


class BlockPartition(object):
    """
    Split of the pole indices of M into the block visible in density-like
    correlators (containing index 0) and the hidden rest.

    permutation lists visible indices first, so that M[perm][:, perm] shows
    the block structure.
    """

    def __init__(self, visible_indices, hidden_indices):
        visible = sorted(int(i) for i in visible_indices)
        hidden = sorted(int(i) for i in hidden_indices)
        everything = sorted(visible + hidden)
        if everything != list(range(len(everything))):
            raise ValueError(
                "visible and hidden indices should partition 0..{}, got {} and {}".format(
                    len(everything) - 1, visible, hidden
                )
            )
        if 0 not in visible:
            raise ValueError("index 0 should be visible")
        self.visible_indices = visible
        self.hidden_indices = hidden
        self.permutation = np.asarray(visible + hidden, dtype=int)

    @property
    def zeta(self):
        return len(self.visible_indices)

    @property
    def num_blocks(self):
        return 1 if not self.hidden_indices else 2

    def permutation_matrix(self):
        return permutation_matrix(self.permutation)

    def __repr__(self):
        return "{}(visible={}, hidden={})".format(
            self.__class__.__name__, self.visible_indices, self.hidden_indices
        )
