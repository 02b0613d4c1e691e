//! Tolerant parsing of the Python-style dict literals the action tools accept,
//! e.g. `{'Offer_1': 2, "Offer_2": 3}` or `{'W1': 'T1'}`.

/// Parse a dict literal into (key, value) token pairs, preserving order.
///
/// Keys and values may be single-quoted, double-quoted, or bare tokens
/// (numbers). Duplicate keys are rejected.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('{')
        .and_then(|rest| rest.strip_suffix('}'))
        .ok_or_else(|| format!("expected a dict literal like {{'key': value}}, got '{text}'"))?;

    let mut pairs = Vec::new();
    let mut chars = inner.chars().peekable();
    loop {
        skip_ws(&mut chars);
        if chars.peek().is_none() {
            break;
        }
        let key = read_token(&mut chars)?;
        skip_ws(&mut chars);
        match chars.next() {
            Some(':') => {}
            other => return Err(format!("expected ':' after key '{key}', got {other:?}")),
        }
        skip_ws(&mut chars);
        let value = read_token(&mut chars)?;
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(format!("duplicate key '{key}'"));
        }
        pairs.push((key, value));
        skip_ws(&mut chars);
        match chars.next() {
            Some(',') => continue,
            None => break,
            other => return Err(format!("expected ',' between entries, got {other:?}")),
        }
    }
    Ok(pairs)
}

fn skip_ws(chars: &mut std::iter::Peekable<std::str::Chars>) {
    while chars.peek().is_some_and(|c| c.is_whitespace()) {
        chars.next();
    }
}

fn read_token(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<String, String> {
    match chars.peek() {
        Some(&quote @ ('\'' | '"')) => {
            chars.next();
            let mut out = String::new();
            for c in chars.by_ref() {
                if c == quote {
                    return Ok(out);
                }
                out.push(c);
            }
            Err(format!("unterminated {quote}-quoted token"))
        }
        Some(_) => {
            let mut out = String::new();
            while let Some(&c) = chars.peek() {
                if c == ':' || c == ',' || c.is_whitespace() {
                    break;
                }
                out.push(c);
                chars.next();
            }
            if out.is_empty() {
                Err("empty token".to_string())
            } else {
                Ok(out)
            }
        }
        None => Err("unexpected end of dict literal".to_string()),
    }
}

/// Parse a non-negative integer value token.
pub fn parse_u64(token: &str) -> Result<u64, String> {
    token
        .trim()
        .parse::<u64>()
        .map_err(|_| format!("'{token}' is not a non-negative integer"))
}

/// Parse a finite number value token.
pub fn parse_f64(token: &str) -> Result<f64, String> {
    let value: f64 = token
        .trim()
        .parse()
        .map_err(|_| format!("'{token}' is not a number"))?;
    if !value.is_finite() {
        return Err(format!("'{token}' is not finite"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quoted_and_bare_values() {
        let pairs = parse("{'Offer_1': 2, \"Offer_2\": 3}").unwrap();
        assert_eq!(
            pairs,
            vec![
                ("Offer_1".to_string(), "2".to_string()),
                ("Offer_2".to_string(), "3".to_string()),
            ]
        );
    }

    #[test]
    fn parses_string_values() {
        let pairs = parse("{'W1': 'T1', 'W2': 'T2'}").unwrap();
        assert_eq!(pairs[1], ("W2".to_string(), "T2".to_string()));
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(parse("{'a': 1, 'a': 2}").is_err());
        assert!(parse("not a dict").is_err());
        assert!(parse("{'a' 1}").is_err());
    }

    #[test]
    fn empty_dict_is_ok() {
        assert!(parse("{}").unwrap().is_empty());
        assert!(parse("{ }").unwrap().is_empty());
    }
}
