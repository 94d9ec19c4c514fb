//! The published drift-numerator formulas, transcribed to ASCII.
//!
//! These blocks are the cross-check half of the dual-path corpus: the symbolic
//! derivation in [`super::corpus`] is authoritative and every entry here is
//! compared against it. Transcription conventions: `mu`, `nu`, `delta` spell the
//! Greek letters; juxtaposition multiplies; the auxiliary parameter written `s`
//! in the e9 analysis is stored in the free variable slot `w`.

/// `(name, formula)` pairs. Names match the derived corpus.
pub const TRANSCRIBED: &[(&str, &str)] = &[
    // I_1 family.
    ("nA1", "-2 M^2 - 3 M mu + 2 M + 1 + (3 M mu - 1) M p"),
    ("s1", "(M^2-2) mu + (1-6 mu)(1-mu) M + 1"),
    ("s1_M2", "3 (2 mu-1)^2"),
    ("s1_M3", "4 mu^2 + 1/2 + 14 (mu-1/2)^2"),
    ("s1_M4plus", "(M-3)((M-4) mu + 6 mu^2 + 1) + 4 mu^2 + 1/2 + 14 (mu-1/2)^2"),
    // I_2 family.
    ("s2", "M^3 mu p-4 M^2 mu p^2-M^3 a+2 M^2 a p+5 M^2 mu p+2 M a p^2-3 M^2 mu-6 M a p+4 M mu p +3 M a-3 M mu-2 a p+2 a"),
    ("s3w", "M (-2 M^2 mu w^2+M^2 mu w+4 M mu w^2+M^3-3 M^2 mu-M mu w-2 mu w^2+M^2-M mu+2 mu) - a (M-1) (M ((M-1)^2-(w-2)^2) + (1-w) (M^2-w-1))"),
    ("s4", "-2 M^3 mu w^2+M^3 mu w+4 M^2 mu w^2-3 M^3 mu+M^3 w-M^2 mu w+M^2 w^2 -2 M mu w^2+3 M^3 -M^2 mu-5 M^2 w-2 M w^2+2 M^2+2 M mu+4 M w+w^2-2 M-1"),
    ("s4_dmu", "-M ((3-w) M^2 + (1+w) M - 2 + 2 (M-1)^2 w^2)"),
    ("s4_mu1", "(1-w) (M-1) (w M (2 M-3) + M + w + 1)"),
    // I_3 family (s5 and its delta-expansion at M = 3 + delta).
    ("s5_M2", "3 (3-2 p) ((1-a)^2 (8 p-5) + (32 (1-a)^2 + 144 a) (1-p)^4 + 12 (1-p)^2 (4 p + a (4 a p + 10 p - 3)))"),
    ("c3e1", "-432 a mu p^5-1296 mu^2 p^5+288 a^2 p^4+2736 a mu p^4-144 a p^5+432 p^4 mu^2-432 mu p^5-1632 p^3 a^2 -2880 a mu p^3+1200 a p^4+4320 mu^2 p^3+2736 mu p^4+2624 p^2 a^2-1152 a mu p^2-3744 a p^3-1728 mu^2 p^2 -2880 mu p^3+288 p^4-1536 p a^2+4928 p^2 a-1152 p^2 mu-1632 p^3+768 a^2-3072 a p+2624 p^2 +1536 a-1536 p+768"),
    ("c3e2", "-288 a mu p^5-1296 mu^2 p^5+168 a^2 p^4+2208 a mu p^4-48 a p^5-360 p^4 mu^2-288 mu p^5-1160 p^3 a^2 -1392 a mu p^3+600 a p^4+6984 mu^2 p^3+2208 mu p^4+1760 p^2 a^2-3840 a mu p^2-2264 a p^3-2016 mu^2 p^2 -1392 mu p^3+168 p^4 -576 p a^2+2720 p^2 a-3840 p^2 mu-1160 p^3+768 a^2-1152 a p+1760 p^2 +1536 a-576 p+768"),
    ("c3e3", "-48 a mu p^5-432 mu^2 p^5+24 a^2 p^4+576 a mu p^4-600 p^4 mu^2-48 mu p^5-268 p^3 a^2+216 a mu p^3+72 a p^4 +4404 mu^2 p^3+576 mu p^4+324 p^2 a^2-3240 a mu p^2-412 a p^3-876 mu^2 p^2+216 mu p^3+24 p^4+336 p a^2 +180 p^2 a-3240 p^2 mu-268 p^3+288 a^2+672 a p+324 p^2+576 a +336 p+288"),
    ("c3e4", "-48 mu^2 p^5+48 a mu p^4-216 p^4 mu^2-20 p^3 a^2+192 a mu p^3+1356 mu^2 p^3+48 mu p^4-4 p^2 a^2-1164 a mu p^2 -20 a p^3-168 mu^2 p^2+192 mu p^3+228 p a^2-112 p^2 a-1164 p^2 mu -20 p^3+48 a^2+456 a p-4 p^2 +96 a+228 p+48"),
    ("c3e5", "-24 p^4 mu^2+24 a mu p^3+204 mu^2 p^3 -4 p^2 a^2-192 a mu p^2-12 mu^2 p^2+24 mu p^3+45 p a^2-16 p^2 a -192 p^2 mu+3 a^2+90 a p-4 p^2+6 a+45 p+3"),
    ("c3e6", "360 p (a+1-2 mu p)^2"),
    // I_4 family.
    ("s6", "2 p-2+(3 mu+6 p-3-4 mu p-2 p^2) M+(4 mu p^2-5 mu p+3 mu-2 p) M^2+(1-mu p) M^3"),
    ("s6_ddelta", "(5 (1-mu) + 2 (1-p) (p+2+10 mu-8 mu p)) + (8 (1-mu) + 2 (1-p) (2+7 mu-4 mu p)) delta"),
    ("s6_M2", "2 (3-2 p) (p (1-mu) + mu (1-3 p))"),
    // I_5 family at M = 2.
    ("s8", "512 b^3 p^8-2688 b^3 p^7+5760 b^3 p^6+3456 b^2 p^7-6912 b^3 p^5-12672 b^2 p^6+5184 b^3 p^4 +16416 b^2 p^5+5184 b p^6-1944 b^3 p^3-11664 b^2 p^4-10368 b p^5+7776 b^2 p^3+1728 p^5-2916 b^2 p^2 +11664 b p^3-11664 b p^2-7776 p^3+4374 b p+17496 p^2-17496 p+6561"),
    // I_5 family, delta-expansion coefficients at M = 3 + delta.
    ("e1", "196608+ (98304 b-393216) p+ (-49152 b^2-442368 mu^2-196608 b-737280 mu+589824) p^2 + (-24576 b^3+221184 b mu^2+98304 b^2+1990656 mu^2+294912 b+663552 mu-540672) p^3 + (49152 b^3+73728 b^2 mu-552960 b mu^2-331776 mu^3-147456 b^2-2322432 mu^2-270336 b +110592 mu+233472) p^4 + (-83968 b^3+184320 b^2 mu-55296 b mu^2+774144 mu^3+135168 b^2+1050624 mu^2+116736 b -239616 mu-36864) p^5 + (52224 b^3-175104 b^2 mu+165888 b mu^2-331776 mu^3-58368 b^2-165888 mu^2-18432 b+55296 mu) p^6 + (-9216 b^3+27648 b^2 mu+9216 b^2) p^7"),
    ("e2", "393216+ (172032 b-540672) p+ (-73728 b^2-958464 mu^2-221184 b-2088960 mu+835584) p^2 +(-30720 b^3+423936 b mu^2+86016 b^2+4589568 mu^2+344064 b+1898496 mu-823296) p^3 + (30720 b^3+282624 b^2 mu-1308672 b mu^2-663552 mu^3-135168 b^2-5031936 mu^2-344064 b -18432 mu+344064) p^4 + (-77312 b^3+181248 b^2 mu+4608 b mu^2+1658880 mu^3+138240 b^2+2068992 mu^2+142848 b -360960 mu-49152) p^5 + (50176 b^3-228864 b^2 mu+290304 b mu^2-691200 mu^3-56832 b^2-290304 mu^2-19968 b+78336 mu) p^6 + (-7680 b^3+32256 b^2 mu+7680 b^2) p^7"),
    ("e3", "344064+ (129024 b-208896) p+ (-46080 b^2-906240 mu^2-49152 b-2558976 mu+430080) p^2 + (-15360 b^3+347136 b mu^2+3072 b^2+4718592 mu^2+129024 b+2217984 mu-522240) p^3 + (-6144 b^3+334848 b^2 mu-1337856 b mu^2-566784 mu^3-30720 b^2-4778496 mu^2-175104 b -198144 mu+210432) p^4 + (-24448 b^3+42240 b^2 mu+100992 b mu^2+1543680 mu^3+52992 b^2+1744512 mu^2+69504 b -223872 mu-26112) p^5 + (17856 b^3-118464 b^2 mu+210816 b mu^2-615168 mu^3-20544 b^2-210816 mu^2-8064 b+44160 mu) p^6 + (-2112 b^3+14016 b^2 mu+2112 b^2) p^7"),
    ("e4", "172032+ (53760 b+64512) p+ (-15360 b^2-488448 mu^2+44544 b-1790976 mu+64512) p^2 + (-3840 b^3+157440 b mu^2-23040 b^2+2843904 mu^2+1416960 mu-176640) p^3 + (-9984 b^3+193536 b^2 mu-772608 b mu^2-268032 mu^3+7680 b^2-2598912 mu^2-44544 b -170496 mu+68352) p^4 + (93024 b mu^2-13632 b^2 mu+32 mu (25448 mu^2+25515 mu-2283)-32 b (77 b^2-282 b-525)-6912) p^5 + (2784 b^3-30336 b^2 mu+81312 b mu^2-303168 mu^3-3264 b^2-81312 mu^2-1440 b+12384 mu) p^6 + (-192 b^3+2688 b^2 mu+192 b^2) p^7"),
    ("e5", "53760+ (13440 b+91392) p+ (-2880 b^2-164160 mu^2+34560 b-792768 mu-26880) p^2 + (-480 b^3+42720 b mu^2-11520 b^2+1109088 mu^2-13440 b+548640 mu-33600) p^3 + (62496 b^2 mu-275952 b mu^2-885744 mu^2-67536 mu-75792 mu^3-96 b (34 b^2-50 b+59)+12432) p^4 + (160 b^3-8544 b^2 mu+38928 b mu^2+266192 mu^3+576 b^2+229104 mu^2+2016 b-13200 mu-912) p^5 + (160 b^3-3840 b^2 mu+17568 b mu^2-89344 mu^3-192 b^2-17568 mu^2-96 b+1728 mu) p^6+192 b^2 mu p^7"),
    ("e6", "10752+ (2016 b+38976) p+ (-288 b^2-35232 mu^2+10848 b-230880 mu-14784) p^2 + (-24 b^3+6936 b mu^2-2544 b^2+290664 mu^2-4032 b+132888 mu-3408) p^3 + (11568 b^2 mu-456 b^3-62472 b mu^2-12816 mu^3+816 b^2-193752 mu^2-288 b-14328 mu+1200) p^4 + (32 b^3-1536 b^2 mu+8688 b mu^2+55168 mu^3+38544 mu^2+96 b-1248 mu-48) p^5 + (-192 b^2 mu+2016 b mu^2-15744 mu^3-2016 mu^2+96 mu) p^6"),
    ("e7", "1344+ (168 b+9072) p+ (-12 b^2-4716 mu^2+1824 b-44340 mu-3024) p^2 + (624 b mu^2-276 b^2+51252 mu^2-504 b+19764 mu-144) p^3 + (-24 b^3+1152 b^2 mu-8760 b mu^2-1200 mu^3+48 b^2-26568 mu^2-1584 mu+48) p^4 + (-96 b^2 mu+1008 b mu^2+7072 mu^3+3600 mu^2-48 mu) p^5+ (96 b mu^2-1536 mu^3-96 mu^2) p^6"),
    ("e8", "96+ (6 b+1236) p+ (-360 mu^2+162 b-5424 mu-300) p^2 + (24 b mu^2-12 b^2+5868 mu^2-24 b+1656 mu) p^3+ (48 b^2 mu-696 b mu^2-48 mu^3-2088 mu^2-72 mu) p^4 + (48 b mu^2+512 mu^3+144 mu^2) p^5-64 mu^3 p^6"),
    ("e9", "4 p^2 mu (4 mu^2 p^3-18 mu p^2+99 mu p-3+15 p-96) -12 p^2+93 p+3 +(6 p^2 (1-2 mu p) (2 mu p+1)) b"),
    ("e10", "3 p (2 mu p-1)^2"),
    // The e9 analysis (s stored in w).
    ("e9_bcoef", "6 p^2 (1-2 mu p) (2 mu p+1)"),
    ("e9a", "2 w^3 p^2-18 p^2 w^2+30 w p^2+99 w^2 p-12 p^2-192 p w-3 w^2+93 p+3"),
    ("e9a_factored", "2 p^2 + (1-w) (6 (1-p) + (1-w) (99 p + 2 p^2 w - 14 p^2 - 3))"),
    ("e9b", "16 p^5 w^3-24 p^4 w^3-72 p^4 w^2+12 p^3 w^3+468 p^3 w^2-2 w^3 p^2-24 p^3 w-426 p^2 w^2 +24 w p^2+111 w^2 p+2 p^2-18 p w-3 w^2+6 w"),
    ("e9b_ww", "6 (2 p-1)^2 (14 + (2 p-1) (2 p^2 w-3 p+15))"),
];

/// Looks up a transcribed formula by name.
pub fn transcribed(name: &str) -> Option<&'static str> {
    TRANSCRIBED.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
}

/// Diagnosed transcription errors: `(name, corrected formula, note)`. The
/// derivation must equal the corrected formula exactly; the comparison report
/// flags any other disagreement as unexplained.
pub const CORRECTIONS: &[(&str, &str, &str)] = &[
    (
        "c3e6",
        "3 p (a+1-2 mu p)^2",
        "printed coefficient 360 is 120 times the derived 3; a positive factor, so the sign argument is unaffected",
    ),
    (
        "s6_ddelta",
        "(5 (1-mu) + 2 (1-p) (p+2+10 mu-8 mu p)) + (8 (1-mu) + 2 (1-p) (2+7 mu-4 mu p)) delta + 3 (1-mu p) delta^2",
        "the quadratic term 3(1-mu p) delta^2 of the derivative is missing; it is non-negative for mu p <= 1, so the printed form is a valid lower bound",
    ),
    (
        "s6_M2",
        "2 (3-2 p) (p (1-mu) + 3 mu (1-p))",
        "second factor reads mu(1-3p) where the value at M = 2 gives 3 mu(1-p); the printed factor is negative for p > 1/3, mu = 1",
    ),
    (
        "e9",
        "4 p^2 mu (4 mu^2 p^3-18 mu p^2+99 mu p-3 mu+15 p-96) -12 p^2+93 p+3 +(6 p^2 (1-2 mu p) (2 mu p+1)) b",
        "constant -3 inside the mu-bracket should be -3 mu; the b = 0 restriction written in terms of s = 2p mu (term -3 s^2, no s p term) agrees with the corrected form",
    ),
];

/// Looks up the diagnosed correction of a transcribed formula.
pub fn correction(name: &str) -> Option<(&'static str, &'static str)> {
    CORRECTIONS.iter().find(|(n, _, _)| *n == name).map(|(_, f, note)| (*f, *note))
}
