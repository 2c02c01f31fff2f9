package org.example.config;

import java.util.HashMap;
import java.util.Map;

public class Configuration {

    private final Map<String, String> values = new HashMap<>();

    public void setString(String key, String value) {
        values.put(key, value);
    }

    public String getString(String key) {
        return values.getOrDefault(key, null);
    }

    public boolean contains(String key) {
        return values.containsKey(key);
    }
}
