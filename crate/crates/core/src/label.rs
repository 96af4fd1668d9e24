use std::borrow::Borrow;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

/// An opaque, cheaply clonable name for a state, action, observation or event.
///
/// Ordering is the ordering of the underlying string, which gives every set
/// of labels a canonical lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(s: &str) -> Self {
        Label(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Deref for Label {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Label {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(Arc::from(s))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Labels appear as whitespace-separated tokens in every text format, and
/// some characters carry structure there.
pub fn is_valid_label(s: &str) -> bool {
    !s.is_empty()
        && s != "*"
        && s.chars().all(|c| {
            !c.is_whitespace() && !matches!(c, ',' | '{' | '}' | '[' | ']' | '#' | '|' | '(' | ')')
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn sets_are_lexicographic() {
        let set: BTreeSet<Label> = ["b", "a", "c"].into_iter().map(Label::from).collect();
        let v: Vec<&str> = set.iter().map(|l| l.as_str()).collect();
        assert_eq!(v, ["a", "b", "c"]);
        assert!(set.contains("b"));
    }

    #[test]
    fn label_validity() {
        assert!(is_valid_label("night"));
        assert!(is_valid_label("s/x=1;y=0"));
        assert!(!is_valid_label("{a}"));
        assert!(!is_valid_label("*"));
        assert!(!is_valid_label("a b"));
        assert!(!is_valid_label(""));
    }
}
