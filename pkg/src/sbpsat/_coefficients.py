"""Exact coefficient tables for the diagonal-norm SBP operator families.

All entries are stored as exact rationals in normalized units (grid spacing
h = 1). Matrices are assembled from these tables so that the structural
identities (Q antisymmetric off the corners, A_S symmetric) hold exactly in
floating point: each off-diagonal pair is written from the same rational.

Conventions:
  - H = h * diag(b_0, .., b_{w-1}, 1, .., 1, b_{w-1}, .., b_0).
  - Q: skew part stored as the strict upper triangle of the w x w corner
    block; couplings outside the block follow the interior antisymmetric
    stencil; Q[0,0] = -1/2 and Q[N,N] = +1/2.
  - A_S: symmetric, stored as the upper triangle of the w x w corner block;
    rows outside the block carry the negated interior second-derivative
    stencil.
  - S row 0 is a one-sided first-derivative stencil (times 1/h); row N is
    the reversed, negated row 0; all other rows are identity.

The order-6 and order-8 closures have free parameters. The order-6 block
uses the standard published choice. For order 8 the first-derivative frees
(Q[5,6], Q[5,7], Q[6,7]) are fixed to minimize the functional error of an
outflow-boundary-layer model problem while staying on the family-wide
minimax floor of the worst solution overshoot, and the second-derivative
frees (A_S[6,6], A_S[6,7], A_S[7,7]) are fixed at a point well inside the
positive-semidefinite region. Both choices alter q relative to other
published order-8 variants.
"""
from __future__ import annotations

from fractions import Fraction as F

# interior central first-derivative coefficients a_1..a_p (order 2p)
D1_INTERIOR = {
    1: [F(1, 2)],
    2: [F(2, 3), F(-1, 12)],
    3: [F(3, 4), F(-3, 20), F(1, 60)],
    4: [F(4, 5), F(-1, 5), F(4, 105), F(-1, 280)],
}

# interior central second-derivative stencils, offsets -p..p (order 2p)
D2_INTERIOR = {
    1: [F(1), F(-2), F(1)],
    2: [F(-1, 12), F(4, 3), F(-5, 2), F(4, 3), F(-1, 12)],
    3: [F(1, 90), F(-3, 20), F(3, 2), F(-49, 18), F(3, 2), F(-3, 20), F(1, 90)],
    4: [F(-1, 560), F(8, 315), F(-1, 5), F(8, 5), F(-205, 72), F(8, 5),
        F(-1, 5), F(8, 315), F(-1, 560)],
}

# diagonal-norm boundary weights b_0..b_{w-1}
H_BOUNDARY = {
    1: [F(1, 2)],
    2: [F(17, 48), F(59, 48), F(43, 48), F(49, 48)],
    3: [F(13649, 43200), F(12013, 8640), F(2711, 4320), F(5359, 4320),
        F(7877, 8640), F(43801, 43200)],
    4: [F(1498139, 5080320), F(1107307, 725760), F(20761, 80640),
        F(1304999, 725760), F(299527, 725760), F(103097, 80640),
        F(670091, 725760), F(5127739, 5080320)],
}

# strict upper triangle of the w x w corner block of Q
Q_CORNER = {
    1: {
        (0, 1): F(1, 2),
    },
    2: {
        (0, 1): F(59, 96), (0, 2): F(-1, 12), (0, 3): F(-1, 32),
        (1, 2): F(59, 96), (1, 3): F(0),
        (2, 3): F(59, 96),
    },
    3: {
        (0, 1): F(104009, 172800), (0, 2): F(30443, 259200),
        (0, 3): F(-33311, 86400), (0, 4): F(16863, 86400),
        (0, 5): F(-15025, 518400),
        (1, 2): F(-311, 51840), (1, 3): F(20229, 17280),
        (1, 4): F(-24337, 34560), (1, 5): F(36661, 259200),
        (2, 3): F(-11155, 25920), (2, 4): F(41287, 51840),
        (2, 5): F(-21999, 86400),
        (3, 4): F(4147, 17280), (3, 5): F(25427, 259200),
        (4, 5): F(342523, 518400),
    },
    4: {
        (0, 1): F(197053194173279, 296343300234240),
        (0, 2): F(-17716499102321, 889029900702720),
        (0, 3): F(-1710457703013277, 8001269106324480),
        (0, 4): F(-776212377859, 222257475175680),
        (0, 5): F(5561358151, 54861456384),
        (0, 6): F(-7733408713, 349659970560),
        (0, 7): F(-10266252413, 1464629160960),
        (1, 2): F(10971828422621, 63502135764480),
        (1, 3): F(21203464936631, 31751067882240),
        (1, 4): F(9306586659847, 163291206251520),
        (1, 5): F(-45689037167, 137153640960),
        (1, 6): F(605650475, 6798943872),
        (1, 7): F(75241594987, 6590831224320),
        (2, 3): F(15381330155633, 63502135764480),
        (2, 4): F(-28891318091327, 127004271528960),
        (2, 5): F(1238464117, 5079764480),
        (2, 6): F(-507287051, 3777191040),
        (2, 7): F(1397050133, 48820972032),
        (3, 4): F(7117147613599, 14111585725440),
        (3, 5): F(19687390199, 137153640960),
        (3, 6): F(37709063249, 305952474240),
        (3, 7): F(-10969248175, 146462916096),
        (4, 5): F(3954918677, 7837350912),
        (4, 6): F(-12403244269, 54391550976),
        (4, 7): F(755960734831, 13181662448640),
        (5, 6): F(3741, 4856),
        (5, 7): F(-473, 3269),
        (6, 7): F(6365, 8334),
    },
}

# boundary-derivative stencils: S row 0 (times 1/h)
# keyed by p; the low-order variant with a first-order S row is separate
S_ROW0 = {
    1: [F(-3, 2), F(2), F(-1, 2)],
    2: [F(-11, 6), F(3), F(-3, 2), F(1, 3)],
    3: [F(-25, 12), F(4), F(-3), F(4, 3), F(-1, 4)],
    4: [F(-137, 60), F(5), F(-5), F(10, 3), F(-5, 4), F(1, 5)],
}
S_ROW0_FIRST_ORDER = [F(-1), F(1)]

# upper triangle of the w x w corner block of A_S (times 1/h)
AS_CORNER = {
    1: {
        (0, 0): F(1),
    },
    2: {
        (0, 0): F(9, 8), (0, 1): F(-59, 48), (0, 2): F(1, 12),
        (0, 3): F(1, 48),
        (1, 1): F(59, 24), (1, 2): F(-59, 48), (1, 3): F(0),
        (2, 2): F(55, 24), (2, 3): F(-59, 48),
        (3, 3): F(59, 24),
    },
    3: {
        (0, 0): F(15583, 12960), (0, 1): F(-253093, 172800),
        (0, 2): F(52391, 129600), (0, 3): F(-68603, 259200),
        (0, 4): F(2351, 14400), (0, 5): F(-4207, 103680),
        (1, 1): F(42353, 12960), (1, 2): F(-134603, 51840),
        (1, 3): F(4141, 2880), (1, 4): F(-86551, 103680),
        (1, 5): F(24641, 129600),
        (2, 2): F(10991, 2160), (2, 3): F(-22583, 5184),
        (2, 4): F(46969, 25920), (2, 5): F(-30409, 86400),
        (3, 3): F(37967, 6480), (3, 4): F(-53369, 17280),
        (3, 5): F(54899, 129600),
        (4, 4): F(2747, 810), (4, 5): F(-820271, 518400),
        (5, 5): F(49, 18),
    },
    4: {
        (0, 0): F(768721495, 2032128),
        (0, 1): F(-4801441661, 2177280),
        (0, 2): F(323394714661, 60963840),
        (0, 3): F(-33847765853, 5080320),
        (0, 4): F(355956637, 79380),
        (0, 5): F(-4217142689, 3048192),
        (0, 6): F(24642103, 967680),
        (0, 7): F(893225327, 15240960),
        (1, 1): F(1246692241, 96768),
        (1, 2): F(-67505289557, 2177280),
        (1, 3): F(113047109599, 2903040),
        (1, 4): F(-2717433007, 103680),
        (1, 5): F(1257678817, 155520),
        (1, 6): F(-64993871, 435456),
        (1, 7): F(-994156453, 2903040),
        (2, 2): F(1203582217, 16128),
        (2, 3): F(-25510670377, 272160),
        (2, 4): F(549462458959, 8709120),
        (2, 5): F(-4709768029, 241920),
        (2, 6): F(1570989137, 4354560),
        (2, 7): F(1255831495, 1524096),
        (3, 3): F(17090126743, 145152),
        (3, 4): F(-172555875601, 2177280),
        (3, 5): F(213023379137, 8709120),
        (3, 6): F(-165591317, 362880),
        (3, 7): F(-6305897483, 6096384),
        (4, 4): F(5163069029, 96768),
        (4, 5): F(-7173716285, 435456),
        (4, 6): F(542656451, 1741824),
        (4, 7): F(3533076833, 5080320),
        (5, 5): F(492962087, 96768),
        (5, 6): F(-44144435, 435456),
        (5, 7): F(-13033527721, 60963840),
        (6, 6): F(7),
        (6, 7): F(2),
        (7, 7): F(12),
    },
}

# closure width (number of specialized boundary rows) per p
CLOSURE_WIDTH = {1: 1, 2: 4, 3: 6, 4: 8}

# number of A_S boundary rows per p (row 0 alone for p = 1)
AS_WIDTH = {1: 1, 2: 4, 3: 6, 4: 8}
