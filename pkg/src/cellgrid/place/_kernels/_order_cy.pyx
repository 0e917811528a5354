# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled ordering kernel.

Contract-identical to _order_py: hpwl_x evaluates the horizontal
wirelength of one ordering, exhaustive_search walks permutations of the
free items in lexicographic order keeping the first strict optimum.
The permutation walk is next_permutation on a C array, and the cost
loop touches nothing but C ints, which is what makes the exhaustive
n <= 8 policy and the n = 10 fixture generation affordable.
"""

from libc.stdlib cimport free as c_free, malloc
from libc.string cimport memcpy


cdef int* _to_c(object seq, Py_ssize_t n) except NULL:
    cdef int* out = <int*> malloc(n * sizeof(int))
    cdef Py_ssize_t i
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        out[i] = seq[i]
    return out


cdef long _eval(int* widths, Py_ssize_t n_items,
                int* pin_item, int* pin_dx, int* pin_net, Py_ssize_t n_pins,
                int n_nets, int* order, Py_ssize_t n_order,
                int* pos, int* minx, int* maxx, char* seen) nogil:
    cdef Py_ssize_t i
    cdef int x = 0
    cdef int item, net, px
    cdef long total = 0
    for i in range(n_order):
        item = order[i]
        pos[item] = x
        x += widths[item]
    for i in range(n_nets):
        seen[i] = 0
    for i in range(n_pins):
        px = pos[pin_item[i]] + pin_dx[i]
        net = pin_net[i]
        if not seen[net]:
            seen[net] = 1
            minx[net] = px
            maxx[net] = px
        elif px < minx[net]:
            minx[net] = px
        elif px > maxx[net]:
            maxx[net] = px
    for i in range(n_nets):
        if seen[i]:
            total += maxx[i] - minx[i]
    return total


cdef bint _next_permutation(int* a, Py_ssize_t n) nogil:
    # standard lexicographic successor; returns 0 after the last one
    cdef Py_ssize_t i, j
    cdef int tmp
    if n < 2:
        return 0
    i = n - 2
    while a[i] >= a[i + 1]:
        if i == 0:
            return 0
        i -= 1
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    tmp = a[i]; a[i] = a[j]; a[j] = tmp
    i += 1
    j = n - 1
    while i < j:
        tmp = a[i]; a[i] = a[j]; a[j] = tmp
        i += 1
        j -= 1
    return 1


def hpwl_x(widths, pin_item, pin_dx, pin_net, int n_nets, order):
    """Horizontal half-perimeter wirelength of a left-to-right ordering."""
    cdef Py_ssize_t n_items = len(widths)
    cdef Py_ssize_t n_pins = len(pin_item)
    cdef Py_ssize_t n_order = len(order)
    cdef int* c_widths = NULL
    cdef int* c_item = NULL
    cdef int* c_dx = NULL
    cdef int* c_net = NULL
    cdef int* c_order = NULL
    cdef int* pos = NULL
    cdef int* minx = NULL
    cdef int* maxx = NULL
    cdef char* seen = NULL
    cdef long cost
    try:
        c_widths = _to_c(widths, n_items)
        c_item = _to_c(pin_item, n_pins)
        c_dx = _to_c(pin_dx, n_pins)
        c_net = _to_c(pin_net, n_pins)
        c_order = _to_c(order, n_order)
        pos = <int*> malloc(n_items * sizeof(int))
        minx = <int*> malloc((n_nets or 1) * sizeof(int))
        maxx = <int*> malloc((n_nets or 1) * sizeof(int))
        seen = <char*> malloc((n_nets or 1) * sizeof(char))
        if pos == NULL or minx == NULL or maxx == NULL or seen == NULL:
            raise MemoryError()
        cost = _eval(c_widths, n_items, c_item, c_dx, c_net, n_pins,
                     n_nets, c_order, n_order, pos, minx, maxx, seen)
    finally:
        c_free(c_widths); c_free(c_item); c_free(c_dx); c_free(c_net)
        c_free(c_order); c_free(pos); c_free(minx); c_free(maxx); c_free(seen)
    return cost


def exhaustive_search(widths, pin_item, pin_dx, pin_net, int n_nets,
                      prefix, free, suffix):
    """Best prefix+perm(free)+suffix ordering; ties go to the first
    (lexicographically smallest) permutation of free."""
    cdef Py_ssize_t n_items = len(widths)
    cdef Py_ssize_t n_pins = len(pin_item)
    cdef Py_ssize_t n_pre = len(prefix)
    cdef Py_ssize_t n_free = len(free)
    cdef Py_ssize_t n_suf = len(suffix)
    cdef Py_ssize_t n_order = n_pre + n_free + n_suf
    cdef int* c_widths = NULL
    cdef int* c_item = NULL
    cdef int* c_dx = NULL
    cdef int* c_net = NULL
    cdef int* order = NULL
    cdef int* best = NULL
    cdef int* pos = NULL
    cdef int* minx = NULL
    cdef int* maxx = NULL
    cdef char* seen = NULL
    cdef long cost, best_cost
    cdef bint more = 1
    cdef Py_ssize_t i
    try:
        c_widths = _to_c(widths, n_items)
        c_item = _to_c(pin_item, n_pins)
        c_dx = _to_c(pin_dx, n_pins)
        c_net = _to_c(pin_net, n_pins)
        order = <int*> malloc((n_order or 1) * sizeof(int))
        best = <int*> malloc((n_order or 1) * sizeof(int))
        pos = <int*> malloc((n_items or 1) * sizeof(int))
        minx = <int*> malloc((n_nets or 1) * sizeof(int))
        maxx = <int*> malloc((n_nets or 1) * sizeof(int))
        seen = <char*> malloc((n_nets or 1) * sizeof(char))
        if (order == NULL or best == NULL or pos == NULL or minx == NULL
                or maxx == NULL or seen == NULL):
            raise MemoryError()
        for i in range(n_pre):
            order[i] = prefix[i]
        for i in range(n_free):
            order[n_pre + i] = free[i]
        for i in range(n_suf):
            order[n_pre + n_free + i] = suffix[i]
        best_cost = -1
        with nogil:
            while more:
                cost = _eval(c_widths, n_items, c_item, c_dx, c_net, n_pins,
                             n_nets, order, n_order, pos, minx, maxx, seen)
                if best_cost < 0 or cost < best_cost:
                    best_cost = cost
                    memcpy(best, order, n_order * sizeof(int))
                more = _next_permutation(order + n_pre, n_free)
        result = tuple(best[i] for i in range(n_order))
    finally:
        c_free(c_widths); c_free(c_item); c_free(c_dx); c_free(c_net)
        c_free(order); c_free(best); c_free(pos); c_free(minx); c_free(maxx)
        c_free(seen)
    return result, best_cost
