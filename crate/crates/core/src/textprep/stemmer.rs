//! English Snowball ("Porter2") stemmer.
//!
//! Follows the current English Snowball rules, including the extended R1
//! prefix list, the `-ing` special cases of step 1b and the `-ogist` /
//! `-alism` / `-lessli` step-2 suffixes. Input is expected to be lowercase
//! ASCII; any other byte is treated as a consonant.

/// Words stemmed to a fixed output (or left alone) before any rule applies.
const EXCEPTIONS: &[(&str, &str)] = &[
    ("andes", "andes"),
    ("atlas", "atlas"),
    ("bias", "bias"),
    ("cosmos", "cosmos"),
    ("early", "earli"),
    ("gently", "gentl"),
    ("howe", "howe"),
    ("idly", "idl"),
    ("news", "news"),
    ("only", "onli"),
    ("singly", "singl"),
    ("skies", "sky"),
    ("skis", "ski"),
    ("sky", "sky"),
    ("ugly", "ugli"),
];

/// Prefixes that fix the start of R1 regardless of the vowel rule.
const R1_PREFIXES: &[&str] = &[
    "arsen", "commun", "emerg", "gener", "inter", "later", "organ", "past", "univers",
];

#[derive(Clone, Copy)]
enum Step1a {
    Sses,
    Ies,
    Keep,
    S,
}

const STEP1A: &[(&str, Step1a)] = &[
    ("sses", Step1a::Sses),
    ("ied", Step1a::Ies),
    ("ies", Step1a::Ies),
    ("ss", Step1a::Keep),
    ("us", Step1a::Keep),
    ("s", Step1a::S),
];

#[derive(Clone, Copy)]
enum Step1b {
    Eed,
    Ed,
    Ing,
}

const STEP1B: &[(&str, Step1b)] = &[
    ("eedly", Step1b::Eed),
    ("eed", Step1b::Eed),
    ("ed", Step1b::Ed),
    ("edly", Step1b::Ed),
    ("ingly", Step1b::Ed),
    ("ing", Step1b::Ing),
];

#[derive(Clone, Copy)]
enum Step2 {
    Replace(&'static str),
    /// `ogi` -> `og` when preceded by `l`
    Ogi,
    /// delete `li` when preceded by a valid li-ending
    Li,
}

const STEP2: &[(&str, Step2)] = &[
    ("anci", Step2::Replace("ance")),
    ("enci", Step2::Replace("ence")),
    ("ogi", Step2::Ogi),
    ("li", Step2::Li),
    ("bli", Step2::Replace("ble")),
    ("abli", Step2::Replace("able")),
    ("alli", Step2::Replace("al")),
    ("fulli", Step2::Replace("ful")),
    ("lessli", Step2::Replace("less")),
    ("ousli", Step2::Replace("ous")),
    ("entli", Step2::Replace("ent")),
    ("aliti", Step2::Replace("al")),
    ("biliti", Step2::Replace("ble")),
    ("iviti", Step2::Replace("ive")),
    ("tional", Step2::Replace("tion")),
    ("ational", Step2::Replace("ate")),
    ("alism", Step2::Replace("al")),
    ("ation", Step2::Replace("ate")),
    ("ization", Step2::Replace("ize")),
    ("izer", Step2::Replace("ize")),
    ("ator", Step2::Replace("ate")),
    ("iveness", Step2::Replace("ive")),
    ("fulness", Step2::Replace("ful")),
    ("ousness", Step2::Replace("ous")),
    ("ogist", Step2::Replace("og")),
];

#[derive(Clone, Copy)]
enum Step3 {
    Replace(&'static str),
    Delete,
    /// delete only inside R2
    DeleteR2,
}

const STEP3: &[(&str, Step3)] = &[
    ("icate", Step3::Replace("ic")),
    ("ative", Step3::DeleteR2),
    ("alize", Step3::Replace("al")),
    ("iciti", Step3::Replace("ic")),
    ("ical", Step3::Replace("ic")),
    ("tional", Step3::Replace("tion")),
    ("ational", Step3::Replace("ate")),
    ("ful", Step3::Delete),
    ("ness", Step3::Delete),
];

const STEP4: &[&str] = &[
    "ic", "ance", "ence", "able", "ible", "ate", "ive", "ize", "iti", "al", "ism", "ion", "er",
    "ous", "ant", "ent", "ment", "ement",
];

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

fn is_vowel_wxy(c: u8) -> bool {
    is_vowel(c) || matches!(c, b'w' | b'x' | b'Y')
}

fn is_valid_li(c: u8) -> bool {
    matches!(
        c,
        b'c' | b'd' | b'e' | b'g' | b'h' | b'k' | b'm' | b'n' | b'r' | b't'
    )
}

/// Stem a single lowercase word.
pub fn stem(word: &str) -> String {
    if let Some((_, out)) = EXCEPTIONS.iter().find(|(w, _)| *w == word) {
        return (*out).to_string();
    }
    if word.len() < 3 {
        return word.to_string();
    }
    let mut w = Word::new(word.as_bytes());
    w.prelude();
    w.mark_regions();
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5();
    w.postlude();
    // every edit only inserts ASCII, so the buffer stays valid UTF-8
    String::from_utf8(w.buf).expect("stemmer edits preserve UTF-8")
}

struct Word {
    buf: Vec<u8>,
    p1: usize,
    p2: usize,
    y_found: bool,
}

impl Word {
    fn new(bytes: &[u8]) -> Self {
        Word {
            buf: bytes.to_vec(),
            p1: 0,
            p2: 0,
            y_found: false,
        }
    }

    fn len(&self) -> usize {
        self.buf.len()
    }

    /// Start index of the longest table suffix matching the end of the word.
    fn longest_suffix<T: Copy>(&self, table: &[(&str, T)]) -> Option<(usize, T)> {
        self.longest_suffix_before(self.len(), table)
    }

    fn longest_suffix_before<T: Copy>(&self, end: usize, table: &[(&str, T)]) -> Option<(usize, T)> {
        let head = &self.buf[..end];
        table
            .iter()
            .filter(|(s, _)| head.ends_with(s.as_bytes()))
            .max_by_key(|(s, _)| s.len())
            .map(|(s, v)| (end - s.len(), *v))
    }

    fn replace_from(&mut self, start: usize, with: &str) {
        self.buf.truncate(start);
        self.buf.extend_from_slice(with.as_bytes());
    }

    /// Short syllable ending at `end`.
    fn short_syllable(&self, end: usize) -> bool {
        let b = &self.buf;
        if end >= 3 && !is_vowel_wxy(b[end - 1]) && is_vowel(b[end - 2]) && !is_vowel(b[end - 3]) {
            return true;
        }
        if end == 2 && !is_vowel(b[1]) && is_vowel(b[0]) {
            return true;
        }
        b[..end].ends_with(b"past")
    }

    fn prelude(&mut self) {
        if self.buf.first() == Some(&b'\'') {
            self.buf.remove(0);
        }
        if self.buf.first() == Some(&b'y') {
            self.buf[0] = b'Y';
            self.y_found = true;
        }
        for i in 1..self.buf.len() {
            if self.buf[i] == b'y' && is_vowel(self.buf[i - 1]) {
                self.buf[i] = b'Y';
                self.y_found = true;
            }
        }
    }

    fn region_after(&self, from: usize) -> usize {
        let b = &self.buf;
        let n = b.len();
        let Some(v) = (from..n).find(|&i| is_vowel(b[i])) else {
            return n;
        };
        match (v..n).find(|&i| !is_vowel(b[i])) {
            Some(c) => c + 1,
            None => n,
        }
    }

    fn mark_regions(&mut self) {
        let prefix = R1_PREFIXES
            .iter()
            .find(|p| self.buf.starts_with(p.as_bytes()))
            .map(|p| p.len());
        self.p1 = match prefix {
            Some(len) => len,
            None => self.region_after(0),
        };
        self.p2 = if self.p1 >= self.len() {
            self.len()
        } else {
            self.region_after(self.p1)
        };
    }

    fn step1a(&mut self) {
        for suffix in ["'s'", "'s", "'"] {
            if self.buf.ends_with(suffix.as_bytes()) {
                let n = self.len() - suffix.len();
                self.buf.truncate(n);
                break;
            }
        }
        let Some((start, rule)) = self.longest_suffix(STEP1A) else {
            return;
        };
        match rule {
            Step1a::Sses => self.replace_from(start, "ss"),
            Step1a::Ies => {
                let with = if start >= 2 { "i" } else { "ie" };
                self.replace_from(start, with);
            }
            Step1a::Keep => {}
            Step1a::S => {
                if start >= 1 && self.buf[..start - 1].iter().any(|&c| is_vowel(c)) {
                    self.buf.truncate(start);
                }
            }
        }
    }

    fn step1b(&mut self) {
        let Some((start, rule)) = self.longest_suffix(STEP1B) else {
            return;
        };
        match rule {
            Step1b::Eed => {
                if start >= self.p1 {
                    let head = &self.buf[..start];
                    if !matches!(head, b"succ" | b"proc" | b"exc") {
                        self.replace_from(start, "ee");
                    }
                }
                return;
            }
            Step1b::Ed => {}
            Step1b::Ing => {
                let head = &self.buf[..start];
                if start == 2 && head[1] == b'y' && !is_vowel(head[0]) {
                    self.replace_from(1, "ie");
                    return;
                }
                if matches!(head, b"even" | b"cann" | b"inn" | b"earr" | b"herr" | b"out") {
                    return;
                }
            }
        }

        if !self.buf[..start].iter().any(|&c| is_vowel(c)) {
            return;
        }
        self.buf.truncate(start);

        let n = self.len();
        if self.buf.ends_with(b"at") || self.buf.ends_with(b"bl") || self.buf.ends_with(b"iz") {
            self.buf.push(b'e');
            return;
        }
        let doubled = n >= 2
            && self.buf[n - 1] == self.buf[n - 2]
            && matches!(
                self.buf[n - 1],
                b'b' | b'd' | b'f' | b'g' | b'm' | b'n' | b'p' | b'r' | b't'
            );
        if doubled {
            if !(n == 3 && matches!(self.buf[0], b'a' | b'e' | b'o')) {
                self.buf.truncate(n - 1);
            }
            return;
        }
        if self.p1 == n && self.short_syllable(n) {
            self.buf.push(b'e');
        }
    }

    fn step1c(&mut self) {
        let n = self.len();
        if n < 3 || !matches!(self.buf[n - 1], b'y' | b'Y') {
            return;
        }
        if !is_vowel(self.buf[n - 2]) {
            self.buf[n - 1] = b'i';
        }
    }

    fn step2(&mut self) {
        let Some((start, rule)) = self.longest_suffix(STEP2) else {
            return;
        };
        if start < self.p1 {
            return;
        }
        match rule {
            Step2::Replace(with) => self.replace_from(start, with),
            Step2::Ogi => {
                if start >= 1 && self.buf[start - 1] == b'l' {
                    self.replace_from(start, "og");
                }
            }
            Step2::Li => {
                if start >= 1 && is_valid_li(self.buf[start - 1]) {
                    self.buf.truncate(start);
                }
            }
        }
    }

    fn step3(&mut self) {
        let Some((start, rule)) = self.longest_suffix(STEP3) else {
            return;
        };
        if start < self.p1 {
            return;
        }
        match rule {
            Step3::Replace(with) => self.replace_from(start, with),
            Step3::Delete => self.buf.truncate(start),
            Step3::DeleteR2 => {
                if start >= self.p2 {
                    self.buf.truncate(start);
                }
            }
        }
    }

    fn step4(&mut self) {
        let Some(suffix) = STEP4
            .iter()
            .filter(|s| self.buf.ends_with(s.as_bytes()))
            .max_by_key(|s| s.len())
        else {
            return;
        };
        let start = self.len() - suffix.len();
        if start < self.p2 {
            return;
        }
        if *suffix == "ion" {
            if start >= 1 && matches!(self.buf[start - 1], b's' | b't') {
                self.buf.truncate(start);
            }
        } else {
            self.buf.truncate(start);
        }
    }

    fn step5(&mut self) {
        let n = self.len();
        match self.buf.last() {
            Some(b'e') => {
                let start = n - 1;
                if start >= self.p2 || (start >= self.p1 && !self.short_syllable(start)) {
                    self.buf.truncate(start);
                }
            }
            Some(b'l') => {
                let start = n - 1;
                if start >= self.p2 && start >= 1 && self.buf[start - 1] == b'l' {
                    self.buf.truncate(start);
                }
            }
            _ => {}
        }
    }

    fn postlude(&mut self) {
        if self.y_found {
            for c in self.buf.iter_mut() {
                if *c == b'Y' {
                    *c = b'y';
                }
            }
        }
    }
}
