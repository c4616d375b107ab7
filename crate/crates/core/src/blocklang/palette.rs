//! Machine-readable description of the block language, served to editors so
//! their palettes follow the language rather than hard-coding it.

use serde::Serialize;

use super::ast::{ArithOp, Attr, CmpOp, Color, IntPredicate, Texture};
use super::path::Section;
use super::typecheck::Ty;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSpec {
    pub kind: &'static str,
    pub sections: Vec<Section>,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttrSpec {
    pub attr: Attr,
    #[serde(rename = "type")]
    pub ty: Ty,
    /// Whether an assert may use a predicate matcher on it.
    pub predicates: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockPalette {
    pub statements: Vec<BlockSpec>,
    pub expressions: Vec<BlockSpec>,
    pub conditions: Vec<BlockSpec>,
    pub colors: Vec<Color>,
    pub textures: Vec<Texture>,
    pub walkable: Vec<Texture>,
    pub attributes: Vec<AttrSpec>,
    pub arithmetic: Vec<ArithOp>,
    pub comparisons: Vec<CmpOp>,
    /// Comparisons also allowed between colors.
    pub color_comparisons: Vec<CmpOp>,
    pub predicates: Vec<IntPredicate>,
    pub int_limit: i64,
}

pub fn palette() -> BlockPalette {
    use Section::*;
    let spec = |kind, sections: &[Section], note| BlockSpec {
        kind,
        sections: sections.to_vec(),
        note,
    };
    BlockPalette {
        statements: vec![
            spec("assign", &[Init, Loop, Setup], "setup may only assign variables"),
            spec("if", &[Loop, Setup], ""),
            spec("assert", &[Asserts], "at least one per test"),
        ],
        expressions: vec![
            spec("int", &[Init, Loop, Setup, Asserts], ""),
            spec("color", &[Init, Loop, Setup, Asserts], ""),
            spec("attr", &[Init, Loop, Setup, Asserts], ""),
            spec("input", &[Loop, Setup, Asserts], "x or y of the tile being entered"),
            spec("var", &[Init, Loop, Setup, Asserts], ""),
            spec("binop", &[Init, Loop, Setup, Asserts], "integers only"),
        ],
        conditions: ["compare", "predicate", "texture_is", "and", "or", "not"]
            .into_iter()
            .map(|k| spec(k, &[Loop, Setup], ""))
            .collect(),
        colors: Color::ALL.to_vec(),
        textures: Texture::ALL.to_vec(),
        walkable: Texture::ALL.into_iter().filter(|t| t.is_walkable()).collect(),
        attributes: Attr::ALL
            .into_iter()
            .map(|attr| AttrSpec {
                attr,
                ty: attr.ty(),
                predicates: attr.ty() == Ty::Int,
            })
            .collect(),
        arithmetic: ArithOp::ALL.to_vec(),
        comparisons: CmpOp::ALL.to_vec(),
        color_comparisons: CmpOp::ALL.into_iter().filter(|o| o.is_equality()).collect(),
        predicates: IntPredicate::ALL.to_vec(),
        int_limit: super::INT_LIMIT,
    }
}
