from collections import defaultdict
from collections import deque

import numpy as np


class SmoothedValue(object):
    """Track a series of values and provide access to smoothed values over a
    window, the global series average and quantiles of the whole series.
    """

    def __init__(self, window_size=20):
        self.deque = deque(maxlen=window_size)
        self.series = []
        self.total = 0.0
        self.count = 0

    def update(self, value):
        self.deque.append(value)
        self.series.append(value)
        self.count += 1
        self.total += value

    @property
    def median(self):
        return float(np.median(list(self.deque)))

    @property
    def avg(self):
        return float(np.mean(list(self.deque)))

    @property
    def global_avg(self):
        return self.total / self.count

    def quantiles(self, qs):
        # nearest rank, so inf entries (failed trials) never interpolate to nan
        ordered = np.sort(np.asarray(self.series, dtype=float))
        last = ordered.size - 1
        return [float(ordered[int(round(q * last))]) for q in qs]


class MetricLogger(object):
    def __init__(self, delimiter="\t", window_size=20):
        self.meters = defaultdict(lambda: SmoothedValue(window_size))
        self.delimiter = delimiter

    def update(self, **kwargs):
        for k, v in kwargs.items():
            if isinstance(v, np.generic):
                v = v.item()
            assert isinstance(v, (float, int))
            self.meters[k].update(v)

    def __getattr__(self, attr):
        if attr in self.meters:
            return self.meters[attr]
        if attr in self.__dict__:
            return self.__dict__[attr]
        raise AttributeError("'{}' object has no attribute '{}'".format(
                    type(self).__name__, attr))

    def __str__(self):
        metric_str = []
        for name, meter in self.meters.items():
            metric_str.append(
                "{}: {:.4g} ({:.4g})".format(name, meter.median, meter.global_avg)
            )
        return self.delimiter.join(metric_str)
