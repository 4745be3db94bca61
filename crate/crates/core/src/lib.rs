pub mod classify;
pub mod concerns;
pub mod corpus;
pub mod emotion;
pub mod error;
pub mod graph;
pub mod pipeline;
pub mod seed;
pub mod topics;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/graph.md")]
    mod graph {}
    #[doc = include_str!("../../../book/src/emotion.md")]
    mod emotion {}
    #[doc = include_str!("../../../book/src/topics.md")]
    mod topics {}
    #[doc = include_str!("../../../book/src/concerns.md")]
    mod concerns {}
    #[doc = include_str!("../../../book/src/classify.md")]
    mod classify {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
}
