"""Pure-Python CYK and derivation-counting kernels.

Grammars arrive pre-indexed: nonterminals are ``0..n_nt-1``, ``binary`` is a
list of ``(A, B, C)`` triples for rules ``A -> B C`` and ``unary[a]`` lists the
nonterminals with a rule ``A -> a`` for terminal id ``a``.
"""


def cyk_recognize(n_nt, binary, unary, word, start):
    n = len(word)
    if n == 0:
        return False
    # chart[i][l] is a bitmask of nonterminals deriving word[i:i+l]
    chart = [[0] * (n + 1) for _ in range(n)]
    for i, a in enumerate(word):
        mask = 0
        for A in unary[a]:
            mask |= 1 << A
        chart[i][1] = mask
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            row = chart[i]
            mask = 0
            for k in range(1, length):
                left = row[k]
                if not left:
                    continue
                right = chart[i + k][length - k]
                if not right:
                    continue
                for A, B, C in binary:
                    if (left >> B) & 1 and (right >> C) & 1:
                        mask |= 1 << A
            row[length] = mask
    return bool((chart[0][n] >> start) & 1)


def cyk_count(n_nt, binary, unary, word, start):
    n = len(word)
    if n == 0:
        return 0
    chart = [[None] * (n + 1) for _ in range(n)]
    for i, a in enumerate(word):
        cell = [0] * n_nt
        for A in unary[a]:
            cell[A] += 1
        chart[i][1] = cell
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            cell = [0] * n_nt
            for k in range(1, length):
                left = chart[i][k]
                right = chart[i + k][length - k]
                for A, B, C in binary:
                    lb = left[B]
                    if lb:
                        rc = right[C]
                        if rc:
                            cell[A] += lb * rc
            chart[i][length] = cell
    return chart[0][n][start]


def length_counts(n_nt, binary, unary_count, n):
    """``table[A][l]`` = number of derivation trees from ``A`` with yield length ``l`` (l >= 1)."""
    table = [[0] * (n + 1) for _ in range(n_nt)]
    if n >= 1:
        for A in range(n_nt):
            table[A][1] = unary_count[A]
    for length in range(2, n + 1):
        for A, B, C in binary:
            tb, tc = table[B], table[C]
            total = 0
            for k in range(1, length):
                x = tb[k]
                if x:
                    y = tc[length - k]
                    if y:
                        total += x * y
            table[A][length] += total
    return table
