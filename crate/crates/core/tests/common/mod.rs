#![allow(dead_code)]

pub mod cbe;
pub mod reference;
