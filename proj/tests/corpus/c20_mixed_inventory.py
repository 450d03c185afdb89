class Inventory:
    def __init__(self):
        self.items = {}

    def add(self, name, qty):
        if self.items.get(name) == None:
            self.items[name] = 0
        self.items[name] += qty

    def names(self):
        result = []
        for name in sorted(self.items):
            result.append(name.upper())
        return result

    def line(self, name):
        return "{}: {}".format(name, self.items[name])


inv = Inventory()
inv.add("nut", 3)
inv.add("bolt", 2)
inv.add("nut", 1)
print(inv.names())
print(inv.line("nut"))
