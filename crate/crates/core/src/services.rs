//! Services and service families: the singleton, composition and
//! encapsulation operators, plus the Boolean register service.
//!
//! A family maps foci to services. Composing families whose foci clash
//! collapses the clashing name to the empty service; encapsulation removes
//! the named services. Both are executable value-level operations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::funits::{FunctionalUnit, UnitState};
use crate::isa::{ident, Ident};

/// Reply of a service to a method request. `Blocked` is the rejection
/// value: the service is unable to process the method.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ServiceReply {
    True,
    False,
    Blocked,
}

impl ServiceReply {
    pub fn from_bool(b: bool) -> Self {
        if b {
            ServiceReply::True
        } else {
            ServiceReply::False
        }
    }
}

/// A service instance: behaviour plus current state.
///
/// The empty service (the unique service that rejects every method) is a
/// distinguished value; a functional-unit service whose interface is empty
/// is identified with it by `eq`, `cmp` and `hash`.
#[derive(Clone, Debug)]
pub enum Service {
    /// The empty service.
    Empty,
    /// Boolean register holding `true` (T) or `false` (F).
    BoolReg(bool),
    /// Functional-unit service: unit behaviour at a specific state.
    Unit(FunctionalUnit, UnitState),
}

impl Service {
    pub fn boolean_register(content: bool) -> Service {
        Service::BoolReg(content)
    }

    /// True for every value denoting the empty service.
    pub fn is_empty_service(&self) -> bool {
        match self {
            Service::Empty => true,
            Service::BoolReg(_) => false,
            Service::Unit(h, _) => h.interface().is_empty(),
        }
    }

    /// Processes a method: reply plus successor service. Total; rejection
    /// is the `Blocked` reply, and the successor is then the empty service.
    pub fn process(&self, method: &Ident) -> (ServiceReply, Service) {
        match self {
            Service::Empty => (ServiceReply::Blocked, Service::Empty),
            Service::BoolReg(b) => {
                if method.as_str() == "set_t" {
                    (ServiceReply::True, Service::BoolReg(true))
                } else if method.as_str() == "set_f" {
                    (ServiceReply::False, Service::BoolReg(false))
                } else if method.as_str() == "get" {
                    (ServiceReply::from_bool(*b), Service::BoolReg(*b))
                } else {
                    (ServiceReply::Blocked, Service::Empty)
                }
            }
            Service::Unit(h, s) => match h.apply(method, s) {
                Some((reply, next)) => {
                    (ServiceReply::from_bool(reply), Service::Unit(h.clone(), next))
                }
                None => (ServiceReply::Blocked, Service::Empty),
            },
        }
    }
}

impl PartialEq for Service {
    fn eq(&self, other: &Self) -> bool {
        match (self.is_empty_service(), other.is_empty_service()) {
            (true, true) => true,
            (false, false) => match (self, other) {
                (Service::BoolReg(a), Service::BoolReg(b)) => a == b,
                (Service::Unit(h, s), Service::Unit(h2, s2)) => h == h2 && s == s2,
                _ => false,
            },
            _ => false,
        }
    }
}

impl Eq for Service {}

impl PartialOrd for Service {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Service {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(s: &Service) -> u8 {
            if s.is_empty_service() {
                0
            } else {
                match s {
                    Service::BoolReg(_) => 1,
                    Service::Unit(..) => 2,
                    Service::Empty => unreachable!("empty has rank 0"),
                }
            }
        }
        match rank(self).cmp(&rank(other)) {
            Ordering::Equal => match (self, other) {
                (Service::BoolReg(a), Service::BoolReg(b)) => a.cmp(b),
                (Service::Unit(h, s), Service::Unit(h2, s2)) => {
                    h.cmp(h2).then_with(|| s.cmp(s2))
                }
                _ => Ordering::Equal,
            },
            ord => ord,
        }
    }
}

impl Hash for Service {
    fn hash<H: Hasher>(&self, state: &mut H) {
        if self.is_empty_service() {
            0u8.hash(state);
            return;
        }
        match self {
            Service::Empty => unreachable!("handled above"),
            Service::BoolReg(b) => {
                1u8.hash(state);
                b.hash(state);
            }
            Service::Unit(h, s) => {
                2u8.hash(state);
                h.hash(state);
                s.hash(state);
            }
        }
    }
}

/// A finite map from foci to services.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ServiceFamily {
    entries: BTreeMap<Ident, Service>,
}

impl ServiceFamily {
    pub fn empty() -> Self {
        ServiceFamily::default()
    }

    /// The family with exactly one named service.
    pub fn singleton(focus: Ident, service: Service) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(focus, service);
        ServiceFamily { entries }
    }

    /// Singleton over the conventional focus `f`.
    pub fn singleton_f(service: Service) -> Self {
        Self::singleton(ident("f"), service)
    }

    /// Composition: union of the entries; a focus named on both sides
    /// collapses to the empty service.
    pub fn compose(&self, other: &Self) -> Self {
        self.compose_with_clashes(other).0
    }

    /// Composition that also reports the clashing foci, for the relevant
    /// use convention diagnostics.
    pub fn compose_with_clashes(&self, other: &Self) -> (Self, Vec<Ident>) {
        let mut entries = self.entries.clone();
        let mut clashes = Vec::new();
        for (focus, svc) in &other.entries {
            if entries.contains_key(focus) {
                clashes.push(focus.clone());
                entries.insert(focus.clone(), Service::Empty);
            } else {
                entries.insert(focus.clone(), svc.clone());
            }
        }
        (ServiceFamily { entries }, clashes)
    }

    /// Encapsulation: removes the services named by `hidden`.
    pub fn encapsulate(&self, hidden: &BTreeSet<Ident>) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(focus, _)| !hidden.contains(*focus))
            .map(|(f, s)| (f.clone(), s.clone()))
            .collect();
        ServiceFamily { entries }
    }

    /// Removes a single focus.
    pub fn encapsulate_one(&self, focus: &Ident) -> Self {
        let mut entries = self.entries.clone();
        entries.remove(focus);
        ServiceFamily { entries }
    }

    /// The set of names of the named services.
    pub fn foci(&self) -> BTreeSet<Ident> {
        self.entries.keys().cloned().collect()
    }

    pub fn get(&self, focus: &Ident) -> Option<&Service> {
        self.entries.get(focus)
    }

    /// Functional update of one entry.
    pub fn with_entry(&self, focus: Ident, service: Service) -> Self {
        let mut entries = self.entries.clone();
        entries.insert(focus, service);
        ServiceFamily { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Service)> {
        self.entries.iter()
    }
}

impl fmt::Display for ServiceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (focus, svc) in &self.entries {
            if !first {
                f.write_str(" (+) ")?;
            }
            first = false;
            write!(f, "{focus}.{svc:?}")?;
        }
        if first {
            f.write_str("(empty family)")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funits::{unit_service, FiniteUnit, UnitKind};

    fn br(b: bool) -> Service {
        Service::boolean_register(b)
    }

    #[test]
    fn boolean_register_methods() {
        let (r, s) = br(true).process(&ident("get"));
        assert_eq!(r, ServiceReply::True);
        assert_eq!(s, br(true));

        let (r, s) = br(true).process(&ident("set_f"));
        assert_eq!(r, ServiceReply::False);
        assert_eq!(s, br(false));

        let (r, s) = br(true).process(&ident("frobnicate"));
        assert_eq!(r, ServiceReply::Blocked);
        assert!(s.is_empty_service());
    }

    #[test]
    fn empty_service_absorbs() {
        let mut svc = Service::Empty;
        for m in ["get", "set_t", "anything"] {
            let (r, next) = svc.process(&ident(m));
            assert_eq!(r, ServiceReply::Blocked);
            assert!(next.is_empty_service());
            svc = next;
        }
    }

    #[test]
    fn empty_unit_service_is_the_empty_service() {
        let unit = FunctionalUnit::new(UnitKind::Finite(FiniteUnit::new(2)));
        let svc = unit_service(&unit, &unit.default_state()).unwrap();
        assert!(svc.is_empty_service());
        assert_eq!(svc, Service::Empty);
    }

    #[test]
    fn singleton_and_foci() {
        let fam = ServiceFamily::singleton(ident("f"), br(true));
        assert_eq!(fam.foci(), BTreeSet::from([ident("f")]));
        // a singleton of the empty service is not the empty family
        let fam = ServiceFamily::singleton(ident("f"), Service::Empty);
        assert!(!fam.is_empty());
    }

    #[test]
    fn composition_examples() {
        let f_true = ServiceFamily::singleton(ident("f"), br(true));
        assert_eq!(f_true.compose(&ServiceFamily::empty()), f_true);

        let f_false = ServiceFamily::singleton(ident("f"), br(false));
        let (collapsed, clashes) = f_true.compose_with_clashes(&f_false);
        assert_eq!(clashes, alloc::vec![ident("f")]);
        assert_eq!(collapsed.get(&ident("f")), Some(&Service::Empty));

        let g = ServiceFamily::singleton(ident("g"), br(false));
        assert_eq!(f_true.compose(&g), g.compose(&f_true));
    }

    #[test]
    fn encapsulation_examples() {
        let fam = ServiceFamily::singleton(ident("f"), br(true));
        let hide_f = BTreeSet::from([ident("f")]);
        let hide_g = BTreeSet::from([ident("g")]);
        assert!(fam.encapsulate(&hide_f).is_empty());
        assert_eq!(fam.encapsulate(&hide_g), fam);
    }
}
