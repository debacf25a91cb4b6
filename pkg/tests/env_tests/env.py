import os


def get_config_root_path():
    ''' Path to the YAML configs shipped with the project '''
    # cur_file_dir is root/tests/env_tests
    cur_file_dir = os.path.dirname(os.path.abspath(os.path.realpath(__file__)))
    ret = os.path.dirname(os.path.dirname(cur_file_dir))
    ret = os.path.join(ret, "configs")
    return ret


def full_tests():
    ''' CMPS_TOMO_FULL_TESTS=1 runs the Monte Carlo tests at full trial counts '''
    return os.environ.get("CMPS_TOMO_FULL_TESTS", "0") == "1"
