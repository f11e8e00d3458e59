use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::FractionalRouting;

/// How types are split per resource.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    /// Large means `u > c/2`.
    Ls,
    /// Large means `u > c/(d+1)`; requires `u <= c/d` everywhere.
    Mls { d: u32 },
    /// LS split, with small types further split at `u >= z* c` (medium) vs tiny.
    Rls { z_star: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeClass {
    Infeasible,
    Large,
    /// `medium` is only ever set under [`Variant::Rls`].
    Small {
        medium: bool,
    },
}

impl SizeClass {
    pub fn is_large(self) -> bool {
        self == SizeClass::Large
    }

    pub fn is_small(self) -> bool {
        matches!(self, SizeClass::Small { .. })
    }

    pub fn is_medium(self) -> bool {
        self == SizeClass::Small { medium: true }
    }

    pub fn is_tiny(self) -> bool {
        self == SizeClass::Small { medium: false }
    }
}

/// LP loads of one resource, split by size class.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ResourceLoads {
    pub total: f64,
    pub large: f64,
    pub small: f64,
    pub medium: f64,
    pub tiny: f64,
    /// Expected number of large-type customers routed here.
    pub mu_large: f64,
    /// Expected number of medium-type customers routed here.
    pub mu_medium: f64,
}

#[derive(Clone, Debug)]
pub struct TypeClassification {
    pub variant: Variant,
    m: usize,
    class: Vec<SizeClass>,
    pub loads: Vec<ResourceLoads>,
}

impl TypeClassification {
    #[inline]
    pub fn class(&self, i: usize, j: usize) -> SizeClass {
        self.class[i * self.m + j]
    }
}

pub fn classify_types(inst: &Instance, routing: &FractionalRouting, variant: Variant) -> Result<TypeClassification> {
    routing.check_dimensions(inst)?;
    let (n, m) = (inst.n(), inst.m());
    if let Variant::Mls { d } = variant {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("MLS needs d >= 2, got {d}")));
        }
        for i in 0..n {
            for j in 0..m {
                let (u, c) = (inst.u(i, j), inst.capacity(j));
                if u > c / d as f64 * (1.0 + 1e-12) {
                    return Err(Error::MlsPrecondition { d, type_id: i, resource: j, utilization: u, capacity: c });
                }
            }
        }
    }
    let mut class = vec![SizeClass::Infeasible; n * m];
    let mut loads = vec![ResourceLoads::default(); m];
    for i in 0..n {
        for j in 0..m {
            let u = inst.u(i, j);
            if u <= 0.0 {
                continue;
            }
            let c = inst.capacity(j);
            let large_cut = match variant {
                Variant::Ls | Variant::Rls { .. } => c / 2.0,
                Variant::Mls { d } => c / (d as f64 + 1.0),
            };
            let cls = if u > large_cut {
                SizeClass::Large
            } else {
                let medium = matches!(variant, Variant::Rls { z_star } if u >= z_star * c);
                SizeClass::Small { medium }
            };
            class[i * m + j] = cls;

            let x = routing.x(i, j);
            let load = x * u;
            let l = &mut loads[j];
            l.total += load;
            match cls {
                SizeClass::Large => {
                    l.large += load;
                    l.mu_large += x;
                }
                SizeClass::Small { medium } => {
                    l.small += load;
                    if medium {
                        l.medium += load;
                        l.mu_medium += x;
                    } else {
                        l.tiny += load;
                    }
                }
                SizeClass::Infeasible => unreachable!(),
            }
        }
    }
    Ok(TypeClassification { variant, m, class, loads })
}
