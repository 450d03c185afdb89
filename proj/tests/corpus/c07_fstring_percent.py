def greet(name, count):
    return "Hello %s, you have %d messages" % (name, count)


def show(value):
    return "value=%r" % value


def ratio(done, total):
    return "progress: %s/%s (100%%)" % (done, total)


print(greet("ann", 3))
print(show("x'y"))
print(ratio(4, 9))
