import errno
import os


def mkdir(path):
    if not path:
        return
    try:
        os.makedirs(path)
    except OSError as e:
        if e.errno != errno.EEXIST:
            raise


def save_config(cfg, path):
    with open(path, 'w') as f:
        f.write(cfg.dump())


def output_path(out, default_name, output_dir="."):
    """Resolve an explicit -o path or fall back to OUTPUT_DIR/default_name."""
    if out:
        return out
    return os.path.join(output_dir, default_name)


def sibling_path(path, suffix):
    """`run/model.json` + `_quality.json` -> `run/model_quality.json`."""
    root, _ = os.path.splitext(path)
    return root + suffix
