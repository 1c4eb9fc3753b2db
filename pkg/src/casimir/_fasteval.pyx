# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation backend: stack machine over double complex values.

Same opcode set and semantics as `_pyeval`; selected at import by `evalcore`.
"""

cimport cython
from libc.stdlib cimport free, malloc

cdef extern from "complex.h":
    double complex csin(double complex) nogil
    double complex ccos(double complex) nogil
    double complex cexp(double complex) nogil
    double complex csqrt(double complex) nogil
    double cabs(double complex) nogil

BACKEND = "compiled"

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_MUL = 3
OP_POW = 4
OP_SIN = 5
OP_COS = 6
OP_EXP = 7


cdef inline double complex _ipow(double complex v, long k) except *:
    cdef double complex out = 1.0
    cdef double complex base
    cdef long kk = k
    if kk < 0:
        if v == 0:
            raise ZeroDivisionError("pole in expression evaluation")
        return 1.0 / _ipow(v, -kk)
    base = v
    while kk:
        if kk & 1:
            out = out * base
        base = base * base
        kk >>= 1
    return out


def run_program(code, consts, nvars, points):
    """Evaluate one compiled expression at many points."""
    cdef long ncode = len(code)
    cdef long nconst = len(consts)
    cdef long npts = len(points)
    cdef long nv = nvars
    cdef long* c_code = <long*> malloc(ncode * sizeof(long))
    cdef double complex* c_consts = <double complex*> malloc(max(nconst, 1) * sizeof(double complex))
    cdef double complex* c_vars = <double complex*> malloc(max(nv, 1) * sizeof(double complex))
    cdef double complex* stack = <double complex*> malloc(256 * sizeof(double complex))
    if c_code == NULL or c_consts == NULL or c_vars == NULL or stack == NULL:
        raise MemoryError()
    cdef long i, j, sp, op, k
    cdef double complex acc, v
    out = []
    try:
        for i in range(ncode):
            c_code[i] = code[i]
        for i in range(nconst):
            c_consts[i] = consts[i]
        for p in range(npts):
            pt = points[p]
            for j in range(nv):
                c_vars[j] = pt[j]
            sp = 0
            i = 0
            while i < ncode:
                op = c_code[i]
                if op == 0:  # CONST
                    stack[sp] = c_consts[c_code[i + 1]]
                    sp += 1
                    i += 2
                elif op == 1:  # VAR
                    stack[sp] = c_vars[c_code[i + 1]]
                    sp += 1
                    i += 2
                elif op == 2:  # ADD
                    k = c_code[i + 1]
                    acc = 0
                    for j in range(sp - k, sp):
                        acc = acc + stack[j]
                    sp -= k
                    stack[sp] = acc
                    sp += 1
                    i += 2
                elif op == 3:  # MUL
                    k = c_code[i + 1]
                    acc = 1.0
                    for j in range(sp - k, sp):
                        acc = acc * stack[j]
                    sp -= k
                    stack[sp] = acc
                    sp += 1
                    i += 2
                elif op == 4:  # POW
                    v = stack[sp - 1]
                    if c_code[i + 2] == 1:
                        stack[sp - 1] = _ipow(v, c_code[i + 1])
                    else:
                        stack[sp - 1] = _ipow(v, (c_code[i + 1] - 1) // 2) * csqrt(v)
                    i += 3
                elif op == 5:
                    stack[sp - 1] = csin(stack[sp - 1])
                    i += 1
                elif op == 6:
                    stack[sp - 1] = ccos(stack[sp - 1])
                    i += 1
                elif op == 7:
                    stack[sp - 1] = cexp(stack[sp - 1])
                    i += 1
                else:
                    raise ValueError("bad opcode")
            out.append(complex(stack[0].real, stack[0].imag))
    finally:
        free(c_code)
        free(c_consts)
        free(c_vars)
        free(stack)
    return out


def hyp2f1_many(a, b, c, zs, tol=1e-15, max_terms=20000):
    """Gauss hypergeometric series, batch evaluation inside the unit disk."""
    cdef double complex ca = a
    cdef double complex cb = b
    cdef double complex cc = c
    cdef double complex z, term, total
    cdef double ctol = tol
    cdef long k, mt = max_terms
    out = []
    for zp in zs:
        z = zp
        if cabs(z) >= 1.0:
            raise ValueError(f"series argument outside the unit disk: |z|={abs(zp):.3f}")
        term = 1.0
        total = 1.0
        k = 0
        while k < mt:
            term = term * (ca + k) * (cb + k) / ((cc + k) * (k + 1)) * z
            total = total + term
            k += 1
            if cabs(term) <= ctol * (1.0 + cabs(total)):
                break
        else:
            raise ValueError("hypergeometric series did not converge")
        out.append(complex(total.real, total.imag))
    return out
