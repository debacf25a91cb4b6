def _register_generic(module_dict, module_name, module):
    if module_name in module_dict:
        raise KeyError("'{}' is already registered".format(module_name))
    module_dict[module_name] = module


class Registry(dict):
    '''
    A helper class for managing registered callables, it extends a dictionary
    and provides a register function.

    Eg. creating a registry:
        ESTIMATORS = Registry()

    There're two ways of registering new entries:
    1): calling register directly:
        def mpm(hp, order, delta_tau):
            ...
        ESTIMATORS.register("mpm", mpm)
    2): used as decorator when declaring the callable:
        @ESTIMATORS.register("ssmpm")
        def ssmpm(hp, order, delta_tau):
            ...

    Lookup is like using a dictionary, eg:
        f = ESTIMATORS["mpm"]
    and a missing name raises a KeyError listing the available entries.
    '''
    def __init__(self, *args, **kwargs):
        super(Registry, self).__init__(*args, **kwargs)

    def register(self, module_name, module=None):
        # used as function call
        if module is not None:
            _register_generic(self, module_name, module)
            return

        # used as decorator
        def register_fn(fn):
            _register_generic(self, module_name, fn)
            return fn

        return register_fn

    def __missing__(self, key):
        raise KeyError(
            "'{}' is not registered, choose one of {}".format(key, sorted(self.keys()))
        )
