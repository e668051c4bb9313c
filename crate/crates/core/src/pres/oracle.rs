//! pres(f) straight from the definition, over all `q^q` functions `g`.

use crate::error::{Error, Result};
use crate::function::FunctionTable;

pub const ORACLE_MAX_ORDER: usize = 5;

pub fn pres_bruteforce_oracle(f: &FunctionTable) -> Result<usize> {
    let q = f.order();
    if q > ORACLE_MAX_ORDER {
        return Err(Error::OracleTooLarge(q));
    }
    let group = f.group();
    let mut g = vec![0usize; q];
    let mut best = usize::MAX;
    let mut hit = vec![false; q];
    loop {
        hit.iter_mut().for_each(|h| *h = false);
        let mut bijective = true;
        for x in 0..q {
            let y = group.add(g[x], f.eval(x));
            if hit[y] {
                bijective = false;
                break;
            }
            hit[y] = true;
        }
        if bijective {
            hit.iter_mut().for_each(|h| *h = false);
            g.iter().for_each(|&v| hit[v] = true);
            best = best.min(hit.iter().filter(|&&h| h).count());
        }
        // odometer step
        let mut pos = 0;
        while pos < q {
            g[pos] += 1;
            if g[pos] < q {
                break;
            }
            g[pos] = 0;
            pos += 1;
        }
        if pos == q {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::{build_group, Group};

    #[test]
    fn small_values() {
        let f5 = Arc::new(build_group("gf:5").unwrap());
        let f3 = Arc::new(build_group("gf:3").unwrap());
        assert_eq!(pres_bruteforce_oracle(&FunctionTable::power_map(f5, 2).unwrap()).unwrap(), 3);
        assert_eq!(pres_bruteforce_oracle(&FunctionTable::power_map(f3, 2).unwrap()).unwrap(), 2);
        let z4 = Arc::new(Group::cyclic(4).unwrap());
        let perm = FunctionTable::new(z4.clone(), vec![2, 0, 3, 1]).unwrap();
        assert_eq!(pres_bruteforce_oracle(&perm).unwrap(), 1);
        let z3 = Arc::new(Group::cyclic(3).unwrap());
        assert_eq!(pres_bruteforce_oracle(&FunctionTable::constant(z3, 0).unwrap()).unwrap(), 3);
    }

    #[test]
    fn rejects_large_groups() {
        let z6 = Arc::new(Group::cyclic(6).unwrap());
        assert!(matches!(pres_bruteforce_oracle(&FunctionTable::identity(z6)), Err(Error::OracleTooLarge(6))));
    }
}
