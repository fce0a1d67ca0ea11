//! Lifespan extraction from categories, infobox fields and lead date lines.

use regex::{Captures, Regex};

use super::year::{Lifespan, Year, IMPUTED_LIFETIME, MAX_LIFETIME, PRESENT_YEAR};
use super::ChronologyError;
use crate::ingest::{LanguageRules, RawPage};

/// Bytes of the page start searched for a `(birth – death)` date line.
const LEAD_BYTES: usize = 2048;

#[derive(Debug, Clone, Copy)]
struct Found {
    year: Year,
    approx: bool,
}

fn signed_year(digits: &str, bc: bool) -> Option<Year> {
    let v: i32 = digits.parse().ok()?;
    Year::new(if bc { -v } else { v }).ok()
}

fn year_from(caps: &Captures<'_>) -> Option<Found> {
    let year = signed_year(caps.name("year")?.as_str(), caps.name("bc").is_some())?;
    Some(Found {
        year,
        approx: caps.name("circa").is_some(),
    })
}

fn from_categories(categories: &[String], patterns: &[Regex]) -> Option<Found> {
    categories.iter().find_map(|c| {
        patterns
            .iter()
            .find_map(|re| re.captures(c).and_then(|caps| year_from(&caps)))
    })
}

fn from_fields(text: &str, patterns: &[Regex]) -> Option<Found> {
    patterns
        .iter()
        .find_map(|re| re.captures(text).and_then(|caps| year_from(&caps)))
}

fn lead(text: &str) -> &str {
    if text.len() <= LEAD_BYTES {
        return text;
    }
    let mut end = LEAD_BYTES;
    while !text.is_char_boundary(end) {
        end -= 1;
    }
    &text[..end]
}

fn from_line(text: &str, patterns: &[Regex]) -> Option<(Found, Found)> {
    let head = lead(text);
    patterns.iter().find_map(|re| {
        let caps = re.captures(head)?;
        let death_bc = caps.name("death_bc").is_some();
        // "318 – 272 BC": a trailing era marker applies to both years.
        let birth_bc = caps.name("birth_bc").is_some() || death_bc;
        let birth = signed_year(caps.name("birth")?.as_str(), birth_bc)?;
        let death = signed_year(caps.name("death")?.as_str(), death_bc)?;
        Some((
            Found { year: birth, approx: caps.name("circa").is_some() },
            Found { year: death, approx: caps.name("death_circa").is_some() },
        ))
    })
}

/// Extracts a lifespan for a person page.
///
/// Category years take precedence over infobox fields, which take
/// precedence over a `(birth – death)` line in the lead. A missing death
/// year is imputed as birth + 70 (approximate) for persons born at least
/// 120 years before [`PRESENT_YEAR`]; later births stay open.
///
/// Returns `Ok(None)` when no birth year is found and an error when the
/// dates contradict each other.
pub fn extract_lifespan(page: &RawPage, rules: &LanguageRules) -> Result<Option<Lifespan>, ChronologyError> {
    let mut birth = from_categories(&page.categories, &rules.birth_categories)
        .or_else(|| from_fields(&page.wikitext, &rules.birth_fields));
    let mut death = from_categories(&page.categories, &rules.death_categories)
        .or_else(|| from_fields(&page.wikitext, &rules.death_fields));
    if birth.is_none() || death.is_none() {
        if let Some((b, d)) = from_line(&page.wikitext, &rules.lifespan_lines) {
            birth = birth.or(Some(b));
            death = death.or(Some(d));
        }
    }
    let Some(birth) = birth else {
        return Ok(None);
    };
    let mut approx = birth.approx;
    let death = match death {
        Some(d) => {
            approx |= d.approx;
            Some(d.year)
        }
        None if birth.year.value() > PRESENT_YEAR - MAX_LIFETIME => None,
        None => {
            approx = true;
            Some(birth.year.plus_years(IMPUTED_LIFETIME))
        }
    };
    Lifespan::new(birth.year, death, approx).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page(categories: &[&str], text: &str) -> RawPage {
        RawPage {
            title: "P".into(),
            namespace: 0,
            wikitext: text.into(),
            categories: categories.iter().map(|s| s.to_string()).collect(),
            redirect: None,
        }
    }

    fn en() -> LanguageRules {
        LanguageRules::bundled("en").unwrap()
    }

    fn extract(categories: &[&str], text: &str) -> Option<Lifespan> {
        extract_lifespan(&page(categories, text), &en()).unwrap()
    }

    #[test]
    fn category_years() {
        assert_eq!(extract(&["46 births", "120 deaths"], ""), Some(Lifespan::years(46, 120).unwrap()));
        assert_eq!(
            extract(&["318 BC births", "272 BC deaths"], ""),
            Some(Lifespan::years(-318, -272).unwrap())
        );
    }

    #[test]
    fn missing_death_is_imputed() {
        let got = extract(&["46 births"], "").unwrap();
        assert_eq!((got.birth.value(), got.death.map(Year::value), got.approx), (46, Some(116), true));
    }

    #[test]
    fn recent_birth_stays_open() {
        let got = extract(&["1950 births"], "").unwrap();
        assert_eq!(got.death, None);
        assert!(!got.approx);
    }

    #[test]
    fn categories_beat_infobox() {
        let text = "{{Infobox person\n| birth_date = 50\n| death_date = 125\n}}";
        assert_eq!(extract(&["46 births", "120 deaths"], text), Some(Lifespan::years(46, 120).unwrap()));
        let infobox_only = extract(&[], "{{Infobox person\n| birth_date = {{birth date|1809|2|12}}\n| death_date = April 15, 1865\n}}");
        assert_eq!(infobox_only, Some(Lifespan::years(1809, 1865).unwrap()));
    }

    #[test]
    fn lead_line_fallback() {
        let got = extract(&["810 deaths"], "'''George Syncellus''' (c. 750 – 810) was a chronicler.").unwrap();
        assert_eq!((got.birth.value(), got.death.unwrap().value(), got.approx), (750, 810, true));
        let bc = extract(&[], "'''Pyrrhus''' (318 – 272 BC) was a king.").unwrap();
        assert_eq!((bc.birth.value(), bc.death.unwrap().value()), (-318, -272));
    }

    #[test]
    fn contradictions_are_rejected() {
        let err = extract_lifespan(&page(&["120 births", "46 deaths"], ""), &en());
        assert!(matches!(err, Err(ChronologyError::DeathBeforeBirth { .. })));
    }

    #[test]
    fn no_birth_no_lifespan() {
        assert_eq!(extract(&["120 deaths"], "no dates here"), None);
    }

    #[test]
    fn other_languages() {
        let de = LanguageRules::bundled("de").unwrap();
        let got = extract_lifespan(&page(&["Geboren 318 v. Chr.", "Gestorben 272 v. Chr."], ""), &de).unwrap();
        assert_eq!(got, Some(Lifespan::years(-318, -272).unwrap()));
        let pt = LanguageRules::bundled("pt").unwrap();
        let got = extract_lifespan(&page(&["Nascidos em 46", "Mortos em 120"], ""), &pt).unwrap();
        assert_eq!(got, Some(Lifespan::years(46, 120).unwrap()));
        let zh = LanguageRules::bundled("zh").unwrap();
        let got = extract_lifespan(&page(&["前318年出生", "前272年逝世"], ""), &zh).unwrap();
        assert_eq!(got, Some(Lifespan::years(-318, -272).unwrap()));
    }
}
