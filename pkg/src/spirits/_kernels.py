"""Compiled inner loops for the log-output map x_t = H(x_{t-1}) + xi_t."""

import math

import numpy as np
from numba import njit

TRANSIT = 0
HIGH = 1
LOW = -1


@njit(cache=True, nogil=True)
def h_scalar(x, c_min, delta, c_0, theta):
    return math.log(c_min + delta / (1.0 + math.exp(2.0 * theta * (c_0 - math.exp(x)))))


@njit(cache=True, nogil=True)
def iterate_map(x0, xi, c_min, delta, c_0, theta, epsilon):
    """x[0] = x0; x[t] = H(x[t-1]) + xi[t] (epsilon = 1) or the EMA update
    x[t] = x[t-1] + epsilon (H(x[t-1]) - x[t-1] + xi[t])."""
    n = xi.shape[0]
    x = np.empty(n)
    x[0] = x0
    if epsilon == 1.0:
        for t in range(1, n):
            x[t] = h_scalar(x[t - 1], c_min, delta, c_0, theta) + xi[t]
    else:
        for t in range(1, n):
            prev = x[t - 1]
            x[t] = prev + epsilon * (h_scalar(prev, c_min, delta, c_0, theta) - prev + xi[t])
    return x


@njit(cache=True, nogil=True)
def hysteresis_labels(x, low_trigger, high_trigger):
    n = x.shape[0]
    out = np.empty(n, dtype=np.int8)
    state = TRANSIT
    for t in range(n):
        if x[t] >= high_trigger:
            state = HIGH
        elif x[t] <= low_trigger:
            state = LOW
        out[t] = state
    return out


@njit(cache=True, nogil=True)
def residence_chunk(x, state, t0, entered, seen, xi, c_min, delta, c_0, theta, epsilon,
                    low_trigger, high_trigger, dur_high, dur_low, restart, x_restart):
    """Advance one ensemble member by len(xi) steps, recording completed
    residence durations.

    ``entered`` is the step index at which the current label was entered;
    ``seen`` counts label commitments so far. The first committed interval is
    incomplete and never recorded. With ``restart`` = HIGH (LOW) the member
    is put back at ``x_restart`` right after each escape from that basin, so
    only one direction is sampled; every such interval is complete.
    Returns the new (x, state, entered, seen, n_high, n_low).
    """
    n_high = 0
    n_low = 0
    for k in range(xi.shape[0]):
        t = t0 + k
        if epsilon == 1.0:
            x = h_scalar(x, c_min, delta, c_0, theta) + xi[k]
        else:
            x = x + epsilon * (h_scalar(x, c_min, delta, c_0, theta) - x + xi[k])
        if x >= high_trigger and state != HIGH:
            if state == LOW and (seen > 1 or restart == LOW):
                dur_low[n_low] = t - entered
                n_low += 1
            state = HIGH
            entered = t
            seen += 1
            if restart == LOW:
                x = x_restart
                state = LOW
        elif x <= low_trigger and state != LOW:
            if state == HIGH and (seen > 1 or restart == HIGH):
                dur_high[n_high] = t - entered
                n_high += 1
            state = LOW
            entered = t
            seen += 1
            if restart == HIGH:
                x = x_restart
                state = HIGH
    return x, state, entered, seen, n_high, n_low
