#!/usr/bin/env python3
"""Reference SMT-LIB2 solver for 32-bit QF_BV, standard library only.

Reads one script on standard input and prints `sat` or `unsat`.  This is a
deliberately independent implementation used to cross-check the package's
built-in backend: its own s-expression parser, its own circuit encodings
(sign-extended subtraction for comparisons, bias-flip signed ordering, the
four-case textbook definition of signed division), and its own SAT search.
It shares no code with the package.
"""

import heapq
import sys

WIDTH = 32
MASK = (1 << WIDTH) - 1


# s-expression reader ---------------------------------------------------------

def tokenize(text):
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c
            i += 1
        elif c == "|":
            j = text.index("|", i + 1)
            yield text[i:j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();":
                j += 1
            yield text[i:j]
            i = j


def parse_all(text):
    stack = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced parentheses")
    return stack[0]


# SAT search -------------------------------------------------------------------

class Solver:
    """Conflict-learning SAT search over int literals."""

    def __init__(self):
        self.n = 0
        self.cls = []
        self.occ = {}
        self.val = [None]
        self.lvl = [0]
        self.why = [None]
        self.trail = []
        self.lims = []
        self.head = 0
        self.score = [0.0]
        self.saved = [False]
        self.heap = []
        self.inc = 1.0
        self.bad = False

    def var(self):
        self.n += 1
        self.val.append(None)
        self.lvl.append(0)
        self.why.append(None)
        self.score.append(0.0)
        self.saved.append(False)
        heapq.heappush(self.heap, (0.0, self.n))
        return self.n

    def lit_val(self, lit):
        v = self.val[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def add(self, lits):
        if self.bad:
            return
        uniq = []
        seen = set()
        for x in lits:
            if -x in seen:
                return
            if x in seen:
                continue
            if self.val[abs(x)] is not None and self.lvl[abs(x)] == 0:
                if self.lit_val(x):
                    return
                continue
            seen.add(x)
            uniq.append(x)
        if not uniq:
            self.bad = True
            return
        if len(uniq) == 1:
            if not self.push(uniq[0], None):
                self.bad = True
            elif self.bcp() is not None:
                self.bad = True
            return
        self.install(uniq)

    def install(self, lits):
        idx = len(self.cls)
        self.cls.append(lits)
        for w in (lits[0], lits[1]):
            self.occ.setdefault(w, []).append(idx)
        return idx

    def push(self, lit, why):
        cur = self.lit_val(lit)
        if cur is not None:
            return cur
        v = abs(lit)
        self.val[v] = lit > 0
        self.lvl[v] = len(self.lims)
        self.why[v] = why
        self.trail.append(lit)
        return True

    def bcp(self):
        while self.head < len(self.trail):
            fal = -self.trail[self.head]
            self.head += 1
            watching = self.occ.get(fal)
            if not watching:
                continue
            keep = []
            conflict = None
            for pos, ci in enumerate(watching):
                c = self.cls[ci]
                if c[0] == fal:
                    c[0], c[1] = c[1], c[0]
                if self.lit_val(c[0]) is True:
                    keep.append(ci)
                    continue
                found = False
                for k in range(2, len(c)):
                    if self.lit_val(c[k]) is not False:
                        c[1], c[k] = c[k], c[1]
                        self.occ.setdefault(c[1], []).append(ci)
                        found = True
                        break
                if found:
                    continue
                keep.append(ci)
                if not self.push(c[0], ci):
                    conflict = ci
                    keep.extend(watching[pos + 1:])
                    break
            self.occ[fal] = keep
            if conflict is not None:
                return conflict
        return None

    def analyze(self, ci):
        top = len(self.lims)
        marked = set()
        out = []
        count = 0
        i = len(self.trail) - 1
        skip_var = None
        while True:
            for q in self.cls[ci]:
                v = abs(q)
                if v == skip_var or v in marked or self.lvl[v] == 0:
                    continue
                marked.add(v)
                self.score[v] += self.inc
                heapq.heappush(self.heap, (-self.score[v], v))
                if self.lvl[v] == top:
                    count += 1
                else:
                    out.append(q)
            while abs(self.trail[i]) not in marked:
                i -= 1
            uip = self.trail[i]
            v = abs(uip)
            marked.discard(v)
            count -= 1
            i -= 1
            if count == 0:
                break
            ci = self.why[v]
            skip_var = v
        lits = [-uip] + out
        if len(lits) == 1:
            return lits, 0
        back = max(self.lvl[abs(q)] for q in lits[1:])
        for k in range(1, len(lits)):
            if self.lvl[abs(lits[k])] == back:
                lits[1], lits[k] = lits[k], lits[1]
                break
        return lits, back

    def unwind(self, level):
        while len(self.lims) > level:
            upto = self.lims.pop()
            while len(self.trail) > upto:
                lit = self.trail.pop()
                v = abs(lit)
                self.saved[v] = self.val[v]
                self.val[v] = None
                self.why[v] = None
                heapq.heappush(self.heap, (-self.score[v], v))
        if self.head > len(self.trail):
            self.head = len(self.trail)

    def pick(self):
        # lazy heap: stale and assigned entries are discarded on pop
        while self.heap:
            key, v = heapq.heappop(self.heap)
            if self.val[v] is not None:
                continue
            if -key != self.score[v]:
                heapq.heappush(self.heap, (-self.score[v], v))
                continue
            return v if self.saved[v] else -v
        return 0

    def run(self):
        if self.bad:
            return False
        conflicts = 0
        limit = 256
        while True:
            ci = self.bcp()
            if ci is not None:
                conflicts += 1
                if not self.lims:
                    return False
                lits, back = self.analyze(ci)
                self.unwind(back)
                if len(lits) == 1:
                    if not self.push(lits[0], None):
                        return False
                else:
                    idx = self.install(lits)
                    self.push(lits[0], idx)
                if conflicts % 512 == 0:
                    # growing the increment decays old activity
                    self.inc *= 2.0
                    if self.inc > 1e150:
                        for v in range(1, self.n + 1):
                            self.score[v] *= 1e-150
                        self.inc *= 1e-150
                        self.heap = [(-self.score[v], v)
                                     for v in range(1, self.n + 1)
                                     if self.val[v] is None]
                        heapq.heapify(self.heap)
                continue
            if conflicts >= limit and self.lims:
                limit = limit + (limit >> 1)
                conflicts = 0
                self.unwind(0)
                continue
            lit = self.pick()
            if lit == 0:
                return True
            self.lims.append(len(self.trail))
            self.push(lit, None)


# circuit construction ------------------------------------------------------------

class Enc:
    def __init__(self):
        self.s = Solver()
        t = self.s.var()
        self.s.add([t])
        self.T = t
        self.F = -t
        self.memo_and = {}
        self.memo_xor = {}

    def AND(self, a, b):
        if a == self.F or b == self.F or a == -b:
            return self.F
        if a == self.T or a == b:
            return b
        if b == self.T:
            return a
        k = (min(a, b), max(a, b))
        if k not in self.memo_and:
            g = self.s.var()
            self.s.add([-g, a])
            self.s.add([-g, b])
            self.s.add([g, -a, -b])
            self.memo_and[k] = g
        return self.memo_and[k]

    def OR(self, a, b):
        return -self.AND(-a, -b)

    def XOR(self, a, b):
        for x, y in ((a, b), (b, a)):
            if x == self.F:
                return y
            if x == self.T:
                return -y
        if a == b:
            return self.F
        if a == -b:
            return self.T
        sign = (a < 0) != (b < 0)
        k = (min(abs(a), abs(b)), max(abs(a), abs(b)))
        if k not in self.memo_xor:
            x, y = k
            g = self.s.var()
            self.s.add([-g, x, y])
            self.s.add([-g, -x, -y])
            self.s.add([g, x, -y])
            self.s.add([g, -x, y])
            self.memo_xor[k] = g
        g = self.memo_xor[k]
        return -g if sign else g

    def EQL(self, a, b):
        return -self.XOR(a, b)

    def ITE(self, c, t, e):
        return self.OR(self.AND(c, t), self.AND(-c, e))

    # vectors (LSB first) ------------------------------------------------------

    def num(self, v, width=WIDTH):
        v &= (1 << width) - 1
        return [self.T if (v >> i) & 1 else self.F for i in range(width)]

    def fresh(self, width=WIDTH):
        return [self.s.var() for _ in range(width)]

    def full_add(self, a, b, c):
        s1 = self.XOR(self.XOR(a, b), c)
        # carry as majority
        cy = self.OR(self.AND(a, b), self.OR(self.AND(a, c),
                                             self.AND(b, c)))
        return s1, cy

    def add(self, a, b, carry=None):
        c = self.F if carry is None else carry
        out = []
        for x, y in zip(a, b):
            s1, c = self.full_add(x, y, c)
            out.append(s1)
        return out, c

    def inv(self, a):
        return [-x for x in a]

    def sub(self, a, b):
        out, _ = self.add(a, self.inv(b), self.T)
        return out

    def neg(self, a):
        out, _ = self.add(self.inv(a), self.num(0, len(a)), self.T)
        return out

    def ite_vec(self, c, t, e):
        return [self.ITE(c, x, y) for x, y in zip(t, e)]

    def eq(self, a, b):
        g = self.T
        for x, y in zip(a, b):
            g = self.AND(g, self.EQL(x, y))
        return g

    def ult(self, a, b):
        # zero-extend to width+1 and subtract: the top bit is the borrow
        w = len(a)
        ax = list(a) + [self.F]
        bx = list(b) + [self.F]
        d, _ = self.add(ax, self.inv(bx), self.T)
        return d[w]

    def slt(self, a, b):
        # flip sign bits, then compare unsigned (order-embedding trick)
        fa = list(a[:-1]) + [-a[-1]]
        fb = list(b[:-1]) + [-b[-1]]
        return self.ult(fa, fb)

    def mul(self, a, b):
        w = len(a)
        acc = self.num(0, w)
        for i in range(w):
            row = [self.F] * i + [self.AND(b[i], a[j])
                                  for j in range(w - i)]
            acc, _ = self.add(acc, row)
        return acc

    def udivrem(self, a, b):
        w = len(a)
        rem = self.num(0, w + 1)
        bx = list(b) + [self.F]
        quo = [self.F] * w
        for i in range(w - 1, -1, -1):
            rem = [a[i]] + rem[:w]
            d, _ = self.add(rem, self.inv(bx), self.T)
            fits = -self.ult(rem, bx)
            quo[i] = fits
            rem = self.ite_vec(fits, d, rem)
        return quo, rem[:w]

    def sdivrem(self, a, b):
        # four-case textbook definition over sign bits
        sa, sb = a[-1], b[-1]
        na, nb = self.neg(a), self.neg(b)
        q_pp, r_pp = self.udivrem(a, b)
        q_np, r_np = self.udivrem(na, b)
        q_pn, r_pn = self.udivrem(a, nb)
        q_nn, r_nn = self.udivrem(na, nb)
        q = self.ite_vec(sa,
                         self.ite_vec(sb, q_nn, self.neg(q_np)),
                         self.ite_vec(sb, self.neg(q_pn), q_pp))
        r = self.ite_vec(sa,
                         self.ite_vec(sb, self.neg(r_nn), self.neg(r_np)),
                         self.ite_vec(sb, r_pn, r_pp))
        return q, r


# script evaluation ------------------------------------------------------------------

def parse_value(tok):
    if tok.startswith("#x"):
        return int(tok[2:], 16)
    if tok.startswith("#b"):
        return int(tok[2:], 2)
    return int(tok)


def strip_sym(tok):
    if tok.startswith("|") and tok.endswith("|"):
        return tok[1:-1]
    return tok


class Script:
    def __init__(self):
        self.enc = Enc()
        self.consts = {}
        self.asserts = []

    def bv(self, e):
        enc = self.enc
        if isinstance(e, str):
            if e.startswith("#") or e.lstrip("-").isdigit():
                return enc.num(parse_value(e))
            name = strip_sym(e)
            if name not in self.consts:
                raise ValueError(f"undeclared constant {name}")
            return self.consts[name]
        head = e[0]
        if isinstance(head, list):  # ((_ bvN w)) style literal
            if head[0] == "_" and head[1].startswith("bv"):
                return self.enc.num(int(head[1][2:]))
            raise ValueError(f"bad bitvector head {head}")
        if head == "_" and e[1].startswith("bv"):
            return enc.num(int(e[1][2:]))
        args = [self.bv(x) for x in e[1:]]
        if head == "bvneg":
            return enc.neg(args[0])
        if head == "bvadd":
            return enc.add(args[0], args[1])[0]
        if head == "bvsub":
            return enc.sub(args[0], args[1])
        if head == "bvmul":
            return enc.mul(args[0], args[1])
        if head == "bvsdiv":
            return enc.sdivrem(args[0], args[1])[0]
        if head == "bvsrem":
            return enc.sdivrem(args[0], args[1])[1]
        if head == "bvudiv":
            return enc.udivrem(args[0], args[1])[0]
        if head == "bvurem":
            return enc.udivrem(args[0], args[1])[1]
        if head == "bvand":
            return [enc.AND(x, y) for x, y in zip(args[0], args[1])]
        if head == "bvor":
            return [enc.OR(x, y) for x, y in zip(args[0], args[1])]
        if head == "bvxor":
            return [enc.XOR(x, y) for x, y in zip(args[0], args[1])]
        if head == "bvnot":
            return enc.inv(args[0])
        raise ValueError(f"unsupported bitvector operator {head}")

    def boolean(self, e):
        enc = self.enc
        if e == "true":
            return enc.T
        if e == "false":
            return enc.F
        if isinstance(e, str):
            raise ValueError(f"boolean symbol {e} not supported")
        head = e[0]
        if head == "not":
            return -self.boolean(e[1])
        if head == "and":
            g = enc.T
            for x in e[1:]:
                g = enc.AND(g, self.boolean(x))
            return g
        if head == "or":
            g = enc.F
            for x in e[1:]:
                g = enc.OR(g, self.boolean(x))
            return g
        if head == "xor":
            return enc.XOR(self.boolean(e[1]), self.boolean(e[2]))
        if head == "=>":
            return enc.OR(-self.boolean(e[1]), self.boolean(e[2]))
        if head == "=":
            return enc.eq(self.bv(e[1]), self.bv(e[2]))
        if head == "distinct":
            return -enc.eq(self.bv(e[1]), self.bv(e[2]))
        if head == "bvslt":
            return enc.slt(self.bv(e[1]), self.bv(e[2]))
        if head == "bvsgt":
            return enc.slt(self.bv(e[2]), self.bv(e[1]))
        if head == "bvsle":
            return -enc.slt(self.bv(e[2]), self.bv(e[1]))
        if head == "bvsge":
            return -enc.slt(self.bv(e[1]), self.bv(e[2]))
        if head == "bvult":
            return enc.ult(self.bv(e[1]), self.bv(e[2]))
        if head == "bvugt":
            return enc.ult(self.bv(e[2]), self.bv(e[1]))
        if head == "ite":
            return enc.ITE(self.boolean(e[1]), self.boolean(e[2]),
                           self.boolean(e[3]))
        raise ValueError(f"unsupported boolean operator {head}")

    def command(self, e):
        head = e[0]
        if head in ("set-logic", "set-option", "set-info", "exit"):
            return None
        if head == "declare-const":
            self.consts[strip_sym(e[1])] = self.enc.fresh()
            return None
        if head == "declare-fun":
            if e[2]:
                raise ValueError("only zero-argument functions supported")
            self.consts[strip_sym(e[1])] = self.enc.fresh()
            return None
        if head == "assert":
            self.asserts.append(self.boolean(e[1]))
            return None
        if head == "check-sat":
            for g in self.asserts:
                self.enc.s.add([g])
            return "sat" if self.enc.s.run() else "unsat"
        raise ValueError(f"unsupported command {head}")


def main():
    text = sys.stdin.read()
    script = Script()
    for form in parse_all(text):
        out = script.command(form)
        if out is not None:
            print(out)
            return 0
    print("unknown")
    return 0


if __name__ == "__main__":
    sys.exit(main())
