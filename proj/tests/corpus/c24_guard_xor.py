def changed(my_page, other_page):
    if (my_page is None) ^ (other_page is None):
        return "one missing"
    elif my_page is None:
        return "both missing"
    return "both present"


print(changed(None, 1), changed(None, None), changed(1, 2))
