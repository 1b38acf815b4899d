pub mod corpus;
pub mod expected;
pub mod verify;
