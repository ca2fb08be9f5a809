use std::str::FromStr;
use weyl_lab::contfrac::{angle_from_cf, cf_expand, construct_f_member, ContinuedFraction};
use weyl_lab::exactangle::golden;
use weyl_lab::{Angle, Error, Result};

/// A rotation number from the command line, with its continued fraction
/// when the argument gives one exactly.
#[derive(Clone, Debug)]
pub struct Theta {
    pub angle: Angle,
    pub cf: Option<ContinuedFraction>,
}

impl Theta {
    /// Given expansion, or the expansion of the angle to `depth` levels.
    pub fn cf(&self, depth: usize) -> Result<ContinuedFraction> {
        match &self.cf {
            Some(cf) => Ok(cf.clone()),
            None => cf_expand(self.angle, depth),
        }
    }
}

/// `golden`, `construct:eps,levels[,seed quotients…]`, a continued fraction
/// `[a1,a2,…]` or `a1,a2,…`, or an angle (`p/q`, decimal, `0x` hex).
pub fn parse_theta(spec: &str) -> Result<Theta> {
    let s = spec.trim();
    let (angle, cf) = if s.eq_ignore_ascii_case("golden") {
        (golden(), None)
    } else if let Some(args) = s.strip_prefix("construct:") {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if parts.len() < 2 {
            return Err(Error::Parse(format!("construct spec needs eps,levels: {s:?}")));
        }
        let eps: f64 = parts[0].parse().map_err(|_| Error::Parse(format!("bad eps {:?}", parts[0])))?;
        let levels: usize = parts[1].parse().map_err(|_| Error::Parse(format!("bad levels {:?}", parts[1])))?;
        let seeds: Vec<u64> = if parts.len() > 2 {
            parts[2..]
                .iter()
                .map(|p| p.parse().map_err(|_| Error::Parse(format!("bad seed quotient {p:?}"))))
                .collect::<Result<_>>()?
        } else {
            vec![2]
        };
        let (cf, _) = construct_f_member(eps, levels, &seeds)?;
        (angle_from_cf(&cf), Some(cf))
    } else if s.starts_with('[') || s.contains(',') {
        let cf = ContinuedFraction::from_str(s.trim_start_matches('[').trim_end_matches(']'))?;
        (angle_from_cf(&cf), Some(cf))
    } else {
        (Angle::from_str(s)?, None)
    };
    Ok(Theta { angle, cf })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_theta("golden").unwrap().angle, golden());
        let c = parse_theta("construct:0.5,4").unwrap();
        assert!(c.cf.unwrap().to_string().starts_with("2,8,4913,"));
        let b = parse_theta("[2,8,4913]").unwrap();
        assert_eq!(b.angle, parse_theta("2, 8, 4913").unwrap().angle);
        assert_eq!(parse_theta("1/4").unwrap().angle, parse_theta("0.25").unwrap().angle);
        assert!(parse_theta("construct:0.5").is_err());
        assert!(parse_theta("bogus").is_err());
        assert_eq!(parse_theta("1/3").unwrap().cf(10).unwrap().to_string(), "3");
    }
}
