//! The built-in rank-`n` Hecke-type braiding (the one whose closed-diagram
//! invariants specialize to the two-variable skein polynomial) together
//! with diagonal background matrices.

use crate::laurent::LaurentPoly;
use crate::oqa::{check_all, CheckReport, Matrix, MatrixOQA, Tensor4};

/// Build the rank-`n` data: on basis pairs the braiding acts by
/// `q` on equal pairs, swap on distinct pairs, plus a `z = q - q^-1`
/// diagonal correction on descending pairs; both background matrices are
/// `diag(q^1, ..., q^n)`.
pub fn build_homfly(n: usize) -> MatrixOQA {
    assert!(n >= 1);
    let z = LaurentPoly::z();
    let mut rho = Tensor4::zero(n);
    let mut rho_inv = Tensor4::zero(n);
    for a in 0..n {
        rho.set(a, a, a, a, LaurentPoly::q_pow(1));
        rho_inv.set(a, a, a, a, LaurentPoly::q_pow(-1));
        for c in 0..n {
            if a != c {
                rho.set(a, c, a, c, LaurentPoly::one());
                rho_inv.set(a, c, a, c, LaurentPoly::one());
            }
            if a < c {
                rho.set(a, c, c, a, z.clone());
                rho_inv.set(a, c, c, a, -&z);
            }
        }
    }
    let diag: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        LaurentPoly::q_pow(i as i64 + 1)
                    } else {
                        LaurentPoly::zero()
                    }
                })
                .collect()
        })
        .collect();
    MatrixOQA::new(n, rho, rho_inv, diag.clone(), diag).expect("diagonal q-powers invertible")
}

/// The telescoping cancellation behind the cross-channel inverse law for
/// this family: for `1 <= lo < hi`,
/// `(q^-1 - q) * (q^{2lo+2} + ... + q^{2hi-2}) + q^{2hi-1} - q^{2lo+1} = 0`.
pub fn telescoping_defect(lo: i64, hi: i64) -> LaurentPoly {
    assert!(1 <= lo && lo < hi);
    let mut sum = LaurentPoly::zero();
    for k in lo + 1..hi {
        sum += &LaurentPoly::q_pow(2 * k);
    }
    let neg_z = -&LaurentPoly::z();
    &(&neg_z * &sum) + &(&LaurentPoly::q_pow(2 * hi - 1) - &LaurentPoly::q_pow(2 * lo + 1))
}

/// Run every axiom check on the rank-`n` data.
pub fn verify_homfly(n: usize) -> CheckReport {
    check_all(&build_homfly(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank2_passes_all_checks() {
        let report = verify_homfly(2);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn rank3_passes_all_checks() {
        let report = verify_homfly(3);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn telescoping_vanishes() {
        for lo in 1..6 {
            for hi in lo + 1..=6 {
                let d = telescoping_defect(lo, hi);
                assert!(d.is_zero(), "lo={lo} hi={hi}: {d}");
            }
        }
    }

    #[test]
    fn skein_relation_on_tensor_entries() {
        // In the diagram-facing index rotation, positive minus negative
        // crossing equals z times the double identity strand.
        let n = 3;
        let oqa = build_homfly(n);
        let z = LaurentPoly::z();
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        let lhs = oqa.rho.get(b, a, c, d) - oqa.rho_inv.get(a, b, d, c);
                        let id = if a == c && b == d {
                            LaurentPoly::one()
                        } else {
                            LaurentPoly::zero()
                        };
                        assert_eq!(lhs, &z * &id, "entry ({a},{c})<-({b},{d})");
                    }
                }
            }
        }
    }
}
