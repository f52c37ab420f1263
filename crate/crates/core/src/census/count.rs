use rayon::prelude::*;

use super::conv::{convolve_supports, ConvolutionMethod};
use super::{EquationInstance, SearchRegion};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};
use crate::Limits;

fn check_region(instance: &EquationInstance, region: &SearchRegion) -> Result<Vec<u64>> {
    if region.full_sizes != instance.orders() {
        return Err(Error::parameter("region does not match the instance's orders"));
    }
    Ok(region.ranges())
}

/// `a_i g_i^x` for `x < range`, in exponent order.
pub(crate) fn term_values(field: &Field, a: FieldElement, g: FieldElement, range: u64) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(range as usize);
    let mut x = a;
    for _ in 0..range {
        out.push(x);
        x = field.mul(x, g);
    }
    out
}

fn all_term_values(instance: &EquationInstance, ranges: &[u64]) -> Vec<Vec<FieldElement>> {
    instance
        .terms()
        .iter()
        .zip(ranges)
        .map(|(t, &r)| term_values(instance.field(), t.a, t.g, r))
        .collect()
}

/// `N_b` for every `b` at once, indexed by the encoding of `b`.
pub fn count_all_b(instance: &EquationInstance, region: &SearchRegion) -> Result<Vec<u64>> {
    count_all_b_with(instance, region, ConvolutionMethod::Auto, &Limits::default())
}

pub fn count_all_b_with(
    instance: &EquationInstance,
    region: &SearchRegion,
    method: ConvolutionMethod,
    limits: &Limits,
) -> Result<Vec<u64>> {
    let ranges = check_region(instance, region)?;
    let q = instance.field().q();
    if q > limits.counting_q {
        return Err(Error::capacity("field size q", q, limits.counting_q));
    }
    let supports: Vec<Vec<u64>> = all_term_values(instance, &ranges)
        .into_iter()
        .map(|vals| vals.into_iter().map(FieldElement::enc).collect())
        .collect();
    let counts = convolve_supports(instance.field(), &supports, method)?;
    debug_assert_eq!(counts.iter().map(|&c| c as u128).sum::<u128>(), region.size());
    Ok(counts)
}

/// Exhaustive enumeration of the region; ground truth for [`count_all_b`].
pub fn count_brute(instance: &EquationInstance, region: &SearchRegion, limits: &Limits) -> Result<Vec<u64>> {
    let ranges = check_region(instance, region)?;
    if region.size() > limits.brute_tuples {
        return Err(Error::capacity("region size", region.size(), limits.brute_tuples));
    }
    let field = instance.field();
    let q = field.q() as usize;
    let values = all_term_values(instance, &ranges);
    let (first, rest) = values.split_first().expect("nonempty");
    let counts = first
        .par_iter()
        .fold(
            || vec![0u64; q],
            |mut acc, &v| {
                enumerate(field, v, rest, &mut |s| acc[s.enc() as usize] += 1);
                acc
            },
        )
        .reduce(
            || vec![0u64; q],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts)
}

fn enumerate(field: &Field, partial: FieldElement, rest: &[Vec<FieldElement>], sink: &mut impl FnMut(FieldElement)) {
    match rest.split_first() {
        None => sink(partial),
        Some((head, tail)) => {
            for &v in head {
                enumerate(field, field.add(partial, v), tail, sink);
            }
        }
    }
}

/// Every exponent tuple in the region solving the equation for target `b`,
/// in lexicographic order.
pub fn solutions_brute(
    instance: &EquationInstance,
    region: &SearchRegion,
    b: FieldElement,
    limits: &Limits,
) -> Result<Vec<Vec<u64>>> {
    let ranges = check_region(instance, region)?;
    if region.size() > limits.brute_tuples {
        return Err(Error::capacity("region size", region.size(), limits.brute_tuples));
    }
    instance.field().check(b)?;
    let values = all_term_values(instance, &ranges);
    let mut out = Vec::new();
    let mut xs = Vec::with_capacity(values.len());
    collect(instance.field(), FieldElement::ZERO, &values, b, &mut xs, &mut out);
    Ok(out)
}

fn collect(
    field: &Field,
    partial: FieldElement,
    rest: &[Vec<FieldElement>],
    b: FieldElement,
    xs: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    match rest.split_first() {
        None => {
            if partial == b {
                out.push(xs.clone());
            }
        }
        Some((head, tail)) => {
            for (x, &v) in head.iter().enumerate() {
                xs.push(x as u64);
                collect(field, field.add(partial, v), tail, b, xs, out);
                xs.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::tests::f7_canonical;
    use std::sync::Arc;

    #[test]
    fn f7_canonical_counts() {
        let inst = f7_canonical(0);
        let region = inst.full_region();
        let counts = count_all_b(&inst, &region).unwrap();
        let mut expected = vec![31u64; 7];
        expected[0] = 30;
        assert_eq!(counts, expected);
        assert_eq!(count_brute(&inst, &region, &Limits::default()).unwrap(), expected);
        assert_eq!(counts.iter().sum::<u64>(), 216);
        let fft = count_all_b_with(&inst, &region, ConvolutionMethod::Fft, &Limits::default()).unwrap();
        assert_eq!(fft, expected);
    }

    #[test]
    fn single_term_is_coset_indicator() {
        let f = Arc::new(Field::prime(13).unwrap());
        let e = FieldElement::new;
        // <3> = {1, 3, 9} in F_13, coset 2<3> = {2, 6, 5}.
        let inst = EquationInstance::new(f, &[(e(2), e(3))], e(0)).unwrap();
        let counts = count_brute(&inst, &inst.full_region(), &Limits::default()).unwrap();
        for b in 0..13u64 {
            assert_eq!(counts[b as usize], u64::from([2, 5, 6].contains(&b)), "b={b}");
        }
    }

    #[test]
    fn mixed_orders_total() {
        let f = Arc::new(Field::prime(7).unwrap());
        let e = FieldElement::new;
        let inst = EquationInstance::new(f, &[(e(1), e(3)), (e(1), e(2))], e(0)).unwrap();
        let region = inst.region(3).unwrap();
        let counts = count_all_b(&inst, &region).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 18);
        assert_eq!(counts, count_brute(&inst, &region, &Limits::default()).unwrap());
    }

    #[test]
    fn solution_lists_match_counts() {
        let inst = f7_canonical(3);
        let region = inst.region(4).unwrap();
        let counts = count_all_b(&inst, &region).unwrap();
        for b in inst.field().elements() {
            let sols = solutions_brute(&inst, &region, b, &Limits::default()).unwrap();
            assert_eq!(sols.len() as u64, counts[b.enc() as usize]);
            assert!(sols.iter().all(|xs| inst.evaluate(xs) == b));
        }
        let sols = solutions_brute(&inst, &region, FieldElement::new(3), &Limits::default()).unwrap();
        assert_eq!(sols[0], vec![0, 0, 0]);
    }

    #[test]
    fn capacity_errors() {
        let inst = f7_canonical(0);
        let region = inst.full_region();
        let tight = Limits { counting_q: 5, brute_tuples: 100, ..Limits::default() };
        assert!(matches!(
            count_all_b_with(&inst, &region, ConvolutionMethod::Auto, &tight),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(count_brute(&inst, &region, &tight), Err(Error::Capacity { .. })));
    }
}
