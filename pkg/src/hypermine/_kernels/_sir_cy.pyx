# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled spreading kernel.

Mirrors the numpy backend step for step and draw for draw; see the package
docstring for the shared contract. The run loops release the GIL so batch
callers can thread across nodes.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdlib cimport free, malloc
from numpy.random cimport bitgen_t

cnp.import_array()


cdef inline void _step(
    const long long[::1] indptr,
    const long long[::1] indices,
    long long n,
    long long m,
    const double[::1] ftable,
    long long clamp_eta,
    double gamma,
    bitgen_t *rng,
    unsigned char[::1] state,
    long long[::1] eta,
    long long[::1] newly,
    long long step_no,
    bint track,
    long long[::1] infection_step,
    long long *n_inf,
    long long *n_rec,
    long long *clamp_count,
) noexcept nogil:
    cdef long long i, j, a, n_new = 0
    cdef double p, u
    cdef bint has
    for a in range(m):
        eta[a] = 0
    for i in range(n):
        if state[i] == 1:
            for j in range(indptr[i], indptr[i + 1]):
                eta[indices[j]] += 1
    for a in range(m):
        if eta[a] >= clamp_eta:
            clamp_count[0] += 1
    # infection draws: ascending node order, one uniform per eligible node
    for i in range(n):
        if state[i] == 0:
            p = 1.0
            has = 0
            for j in range(indptr[i], indptr[i + 1]):
                a = indices[j]
                if eta[a] > 0:
                    has = 1
                p *= ftable[eta[a]]
            if has:
                u = rng.next_double(rng.state)
                if u < 1.0 - p:
                    newly[n_new] = i
                    n_new += 1
    # recovery draws for nodes infected at step start, ascending
    for i in range(n):
        if state[i] == 1:
            u = rng.next_double(rng.state)
            if u < gamma:
                state[i] = 2
                n_rec[0] += 1
                n_inf[0] -= 1
    for j in range(n_new):
        state[newly[j]] = 1
        if track:
            infection_step[newly[j]] = step_no
    n_inf[0] += n_new


cdef bitgen_t *_bitgen_ptr(object bit_generator):
    return <bitgen_t *> PyCapsule_GetPointer(bit_generator.capsule, "BitGenerator")


def sir_run(
    node_indptr,
    node_indices,
    n_edges,
    ftable,
    clamp_eta,
    gamma,
    seed_nodes,
    generator,
    max_steps=0,
    record_series=False,
    track_infection_step=False,
):
    """Single simulation run; same outcome dict as the numpy backend."""
    cdef const long long[::1] indptr = np.ascontiguousarray(node_indptr, dtype=np.int64)
    cdef const long long[::1] indices = np.ascontiguousarray(node_indices, dtype=np.int64)
    cdef const double[::1] table = np.ascontiguousarray(ftable, dtype=np.float64)
    cdef long long n = indptr.shape[0] - 1
    cdef long long m = n_edges
    cdef long long clamp = clamp_eta
    cdef double g = gamma
    cdef long long cap_steps = max_steps
    cdef bint record = bool(record_series)
    cdef bint track = bool(track_infection_step)

    state_arr = np.zeros(n, dtype=np.uint8)
    seeds = np.asarray(seed_nodes, dtype=np.int64)
    state_arr[seeds] = 1
    inf_step_arr = np.full(n, -1, dtype=np.int64)
    inf_step_arr[seeds] = 0

    cdef unsigned char[::1] state = state_arr
    cdef long long[::1] infection_step = inf_step_arr
    eta_arr = np.zeros(m, dtype=np.int64)
    newly_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] eta = eta_arr
    cdef long long[::1] newly = newly_arr

    cdef bitgen_t *rng = _bitgen_ptr(generator.bit_generator)

    cdef long long n_inf = seeds.shape[0]
    cdef long long n_rec = 0
    cdef long long clamp_count = 0
    cdef long long step = 0

    r_series, i_series, s_series = [], [], []
    while n_inf > 0 and (cap_steps == 0 or step < cap_steps):
        step += 1
        with nogil:
            _step(
                indptr, indices, n, m, table, clamp, g, rng,
                state, eta, newly, step, track, infection_step,
                &n_inf, &n_rec, &clamp_count,
            )
        if record:
            r_series.append(n_rec)
            i_series.append(n_inf)
            s_series.append(n - n_inf - n_rec)
    return {
        "final_recovered": int(n_rec),
        "final_infected": int(n_inf),
        "steps": int(step),
        "r_series": np.asarray(r_series, dtype=np.int64) if record else None,
        "i_series": np.asarray(i_series, dtype=np.int64) if record else None,
        "s_series": np.asarray(s_series, dtype=np.int64) if record else None,
        "infection_step": inf_step_arr if track else None,
        "clamp_count": int(clamp_count),
    }


def sir_final_sizes(
    node_indptr,
    node_indices,
    n_edges,
    ftable,
    clamp_eta,
    gamma,
    seed_nodes_per_run,
    bit_generators,
    max_steps=0,
):
    """Batch of single-seed runs returning final sizes and clamp tallies.

    The whole batch executes without the GIL, so callers can thread over
    disjoint batches.
    """
    cdef const long long[::1] indptr = np.ascontiguousarray(node_indptr, dtype=np.int64)
    cdef const long long[::1] indices = np.ascontiguousarray(node_indices, dtype=np.int64)
    cdef const double[::1] table = np.ascontiguousarray(ftable, dtype=np.float64)
    cdef long long n = indptr.shape[0] - 1
    cdef long long m = n_edges
    cdef long long clamp = clamp_eta
    cdef double g = gamma
    cdef long long cap_steps = max_steps

    seeds_arr = np.ascontiguousarray(seed_nodes_per_run, dtype=np.int64)
    cdef const long long[::1] run_seeds = seeds_arr
    cdef long long n_runs = run_seeds.shape[0]
    if n_runs != len(bit_generators):
        raise ValueError("one bit generator per run required")

    sizes_arr = np.zeros(n_runs, dtype=np.int64)
    clamps_arr = np.zeros(n_runs, dtype=np.int64)
    cdef long long[::1] sizes = sizes_arr
    cdef long long[::1] clamps = clamps_arr

    state_arr = np.zeros(n, dtype=np.uint8)
    eta_arr = np.zeros(m, dtype=np.int64)
    newly_arr = np.zeros(n, dtype=np.int64)
    dummy_arr = np.zeros(1, dtype=np.int64)
    cdef unsigned char[::1] state = state_arr
    cdef long long[::1] eta = eta_arr
    cdef long long[::1] newly = newly_arr
    cdef long long[::1] dummy = dummy_arr

    cdef bitgen_t **rngs = <bitgen_t **> malloc(n_runs * sizeof(bitgen_t *))
    if rngs == NULL:
        raise MemoryError()
    cdef long long r, i
    cdef long long n_inf, n_rec, clamp_count, step
    try:
        for r in range(n_runs):
            rngs[r] = _bitgen_ptr(bit_generators[r])
        with nogil:
            for r in range(n_runs):
                for i in range(n):
                    state[i] = 0
                state[run_seeds[r]] = 1
                n_inf = 1
                n_rec = 0
                clamp_count = 0
                step = 0
                while n_inf > 0 and (cap_steps == 0 or step < cap_steps):
                    step += 1
                    _step(
                        indptr, indices, n, m, table, clamp, g, rngs[r],
                        state, eta, newly, step, 0, dummy,
                        &n_inf, &n_rec, &clamp_count,
                    )
                sizes[r] = n_rec
                clamps[r] = clamp_count
    finally:
        free(rngs)
    return sizes_arr, clamps_arr
