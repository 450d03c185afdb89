def diff_pages(self, other, intersection, changes):
    for pageno in intersection:
        my_page = self._pages[pageno]
        other_page = other._pages[pageno]
        if (my_page is None) ^ (other_page is None):
            changes[pageno] = None
        elif my_page is None:
            pass
        else:
            changed_offsets = my_page.changed_bytes(
                other_page,
                page_addr=pageno * self.page_size)
            if changed_offsets:
                changes[pageno] = changed_offsets
