//! Data-parallel helpers. With the `parallel` feature these dispatch to
//! rayon; without it they run the same closures sequentially. Results are
//! identical either way: reductions use a total order and collections keep
//! input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Best-scoring candidate: highest score, lowest index on ties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Best<T> {
    pub index: usize,
    pub score: f64,
    pub value: T,
}

impl<T: Copy> Best<T> {
    #[inline]
    pub fn pick(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => {
                if b.score > a.score || (b.score == a.score && b.index < a.index) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        }
    }
}

pub fn argmax_seq<T, F>(len: usize, score: F) -> Option<Best<T>>
where
    T: Copy,
    F: Fn(usize) -> (f64, T),
{
    (0..len).fold(None, |acc, i| {
        let (s, v) = score(i);
        Best::pick(acc, Some(Best { index: i, score: s, value: v }))
    })
}

#[cfg(feature = "parallel")]
pub fn argmax<T, F>(len: usize, score: F) -> Option<Best<T>>
where
    T: Copy + Send,
    F: Fn(usize) -> (f64, T) + Sync,
{
    (0..len)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| {
            let (s, v) = score(i);
            Some(Best { index: i, score: s, value: v })
        })
        .reduce(|| None, Best::pick)
}

#[cfg(not(feature = "parallel"))]
pub fn argmax<T, F>(len: usize, score: F) -> Option<Best<T>>
where
    T: Copy + Send,
    F: Fn(usize) -> (f64, T) + Sync,
{
    argmax_seq(len, score)
}

pub fn map_collect<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn map_range<O, F>(len: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Calls `f(chunk_index, chunk)` for each `chunk`-sized piece of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }
}
