def stats(values):
    low = min(values)
    high = max(values)
    spread = high - low
    buckets = {}
    for v in values:
        buckets[v] = values.count(v)
    return "{} {} {} {}".format(low, high, spread, sorted(buckets.items()))


print(stats([3, 1, 4, 1, 5, 9, 2, 6]))
