pub mod basis;
pub mod checkpoint;
pub mod config;
pub mod dg;
pub mod driver;
pub mod equations;
pub mod error;
pub mod export;
pub mod field;
pub mod fv;
pub mod lifting;
pub mod linalg;
pub mod mesh;
pub mod mortar;
pub mod setups;
pub mod time;

pub use error::{Error, Result};
