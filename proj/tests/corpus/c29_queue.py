def drain(queue):
    done = []
    while len(queue) != 0:
        done.append(queue.pop(0))
    return done


def search(queue, goal):
    ok = False
    for item in queue:
        if item == goal:
            ok = True
            break
    if not ok:
        return -1
    return queue.index(goal)


print(drain([3, 2, 1]))
print(search([5, 6, 7], 7), search([5, 6, 7], 8))
