package org.example.text;

import java.util.List;
import java.util.Objects;

public class Names {

    public static boolean sameOwner(String owner, String other) {
        return owner == other;
    }

    public static boolean sameLabel(String label, String other) {
        if (label == null && other == null) {
            return true;
        }
        return Objects.equals(label, other);
    }

    public static int indexOf(List<String> names, String wanted) {
        int i = 0;
        for (String name : names) {
            if (Objects.equals(name, wanted)) {
                return i;
            }
            i++;
        }
        return -1;
    }
}
