//! JSON documents for programs.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecodeError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at line {line}, column {column} (key `{key}`): {message}")]
    Schema {
        key: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl From<serde_json::Error> for DecodeError {
    fn from(e: serde_json::Error) -> Self {
        use serde_json::error::Category;
        let (line, column) = (e.line(), e.column());
        let message = e.to_string();
        match e.classify() {
            Category::Data => DecodeError::Schema {
                key: offending_key(&message).unwrap_or_default(),
                line,
                column,
                message,
            },
            Category::Io | Category::Syntax | Category::Eof => DecodeError::Parse { line, column, message },
        }
    }
}

// serde_json quotes the field or variant it rejected in backticks.
fn offending_key(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

/// Canonical compact JSON. Field order is fixed by the type definitions, so
/// equal programs always produce identical bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("AST serialization is infallible")
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("AST serialization is infallible")
}

pub fn from_json<T: DeserializeOwned>(doc: &str) -> Result<T, DecodeError> {
    Ok(serde_json::from_str(doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocklang::ast::*;

    fn shirt_cut() -> CritterProgram {
        CritterProgram::new(
            vec![Stmt::set_attr(Attr::ShirtColor, Expr::color(Color::Red))],
            vec![Stmt::if_then(
                BoolExpr::texture_is(Texture::Dirt),
                vec![Stmt::set_attr(Attr::ShirtColor, Expr::color(Color::Blue))],
            )],
        )
    }

    #[test]
    fn canonical_document() {
        let doc = to_json(&shirt_cut());
        assert_eq!(
            doc,
            r#"{"init":[{"kind":"assign","target":{"kind":"attr","attr":"shirt_color"},"value":{"kind":"color","value":"RED"}}],"loop":[{"kind":"if","cond":{"kind":"texture_is","texture":"DIRT"},"then":[{"kind":"assign","target":{"kind":"attr","attr":"shirt_color"},"value":{"kind":"color","value":"BLUE"}}],"else":[]}]}"#
        );
        assert_eq!(from_json::<CritterProgram>(&doc).unwrap(), shirt_cut());
    }

    #[test]
    fn unknown_statement_kind_is_schema_error() {
        let doc = r#"{"init":[],"loop":[{"kind":"while","cond":{"kind":"texture_is","texture":"DIRT"}}]}"#;
        match from_json::<CritterProgram>(doc) {
            Err(DecodeError::Schema { key, .. }) => assert_eq!(key, "while"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_field_is_schema_error() {
        let doc = r#"{"init":[],"loop":[],"extra":1}"#;
        match from_json::<CritterProgram>(doc) {
            Err(DecodeError::Schema { key, .. }) => assert_eq!(key, "extra"),
            other => panic!("expected schema error, got {other:?}"),
        }
        let nested = r#"{"init":[{"kind":"assign","target":{"kind":"attr","attr":"size"},"value":{"kind":"int","value":1,"bogus":2}}],"loop":[]}"#;
        assert!(matches!(from_json::<CritterProgram>(nested), Err(DecodeError::Schema { .. })));
    }

    #[test]
    fn syntax_error_has_location() {
        match from_json::<CritterProgram>("{\n  \"init\": [,\n}") {
            Err(DecodeError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_loop_is_valid() {
        let p: CritterProgram = from_json(r#"{"init":[],"loop":[]}"#).unwrap();
        assert!(p.body.is_empty());
    }

    #[test]
    fn test_program_document() {
        let t = TestProgram::new(
            vec![Stmt::set_var("v", Expr::int(6))],
            vec![
                Assert::equals(Attr::Size, Expr::var("v")),
                Assert::satisfies(Attr::Size, IntPredicate::Even),
            ],
        );
        let doc = to_json(&t);
        assert!(doc.contains(r#""kind":"assert""#));
        assert_eq!(from_json::<TestProgram>(&doc).unwrap(), t);
        assert!(from_json::<TestProgram>(r#"{"setup":[],"asserts":[{"kind":"check","property":"size"}]}"#).is_err());
    }
}
