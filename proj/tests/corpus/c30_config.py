DEFAULTS = {"retries": 3, "timeout": 10}


def merged(overrides):
    config = {}
    for key in DEFAULTS:
        config[key] = overrides.get(key, DEFAULTS[key])
    return config


def describe(config):
    retries = config["retries"]
    timeout = config["timeout"]
    return "retries=%d timeout=%d" % (retries, timeout)


print(describe(merged({"timeout": 5})))
