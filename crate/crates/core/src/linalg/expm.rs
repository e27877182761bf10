use super::{cmul, one_norm, CMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

fn scaled_identity(n: usize, s: f64) -> CMatrix {
    DMatrix::from_diagonal_element(n, n, Complex64::new(s, 0.0))
}

fn lincomb(terms: &[(f64, &CMatrix)], n: usize, id: f64) -> CMatrix {
    let mut out = scaled_identity(n, id);
    for (c, m) in terms {
        out.zip_apply(*m, |o, x| *o += x * *c);
    }
    out
}

/// Matrix exponential by scaling and squaring with diagonal Padé approximants.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    let a2 = cmul(a, a);

    for (m, theta) in THETA {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let mut powers = vec![scaled_identity(n, 1.0), a2.clone()];
            while powers.len() <= m / 2 {
                let next = cmul(powers.last().unwrap(), &a2);
                powers.push(next);
            }
            let mut u_inner = CMatrix::zeros(n, n);
            let mut v = CMatrix::zeros(n, n);
            for (k, p) in powers.iter().enumerate() {
                u_inner.zip_apply(p, |o, x| *o += x * b[2 * k + 1]);
                v.zip_apply(p, |o, x| *o += x * b[2 * k]);
            }
            let u = cmul(a, &u_inner);
            return pade_solve(&u, &v);
        }
    }

    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(s);
    let a1 = a * Complex64::new(scale, 0.0);
    let a2 = &a2 * Complex64::new(scale * scale, 0.0);
    let a4 = cmul(&a2, &a2);
    let a6 = cmul(&a4, &a2);
    let b = &B13;

    let u_hi = lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n, 0.0);
    let u_inner = cmul(&a6, &u_hi) + lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], n, b[1]);
    let u = cmul(&a1, &u_inner);
    let v_hi = lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n, 0.0);
    let v = cmul(&a6, &v_hi) + lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], n, b[0]);

    let mut r = pade_solve(&u, &v);
    for _ in 0..s {
        r = cmul(&r, &r);
    }
    r
}

fn pade_solve(u: &CMatrix, v: &CMatrix) -> CMatrix {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Pade denominator is nonsingular for the selected degree")
}
