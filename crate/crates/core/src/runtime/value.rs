use std::fmt;
use std::sync::Arc;

use crate::syntax::{ClassDecl, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Ref(usize),
    Void,
}

impl Value {
    pub fn default_for(ty: &Type) -> Value {
        match ty {
            Type::Integer => Value::Int(0),
            Type::Boolean => Value::Bool(false),
            Type::Class(_) | Type::None => Value::Void,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Ref(id) => write!(f, "#{id}"),
            Value::Void => f.write_str("Void"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Object {
    pub class: usize,
    pub fields: Vec<Value>,
}

/// Object store. Cloning is cheap: objects are shared until written.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Heap {
    objects: Vec<Arc<Object>>,
}

impl Heap {
    pub fn alloc(&mut self, class_index: usize, class: &ClassDecl) -> Value {
        let fields = class
            .attributes
            .iter()
            .map(|a| Value::default_for(&a.ty))
            .collect();
        self.objects.push(Arc::new(Object {
            class: class_index,
            fields,
        }));
        Value::Ref(self.objects.len() - 1)
    }

    pub fn get(&self, id: usize) -> &Object {
        &self.objects[id]
    }

    pub fn field(&self, id: usize, field: usize) -> Value {
        self.objects[id].fields[field]
    }

    pub fn set_field(&mut self, id: usize, field: usize, v: Value) {
        Arc::make_mut(&mut self.objects[id]).fields[field] = v;
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> impl Iterator<Item = &Object> {
        self.objects.iter().map(|o| o.as_ref())
    }
}
