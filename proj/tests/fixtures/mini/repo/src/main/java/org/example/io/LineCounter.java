package org.example.io;

import java.io.BufferedReader;
import java.io.IOException;
import java.io.Reader;

public class LineCounter {

    public int count(Reader source) throws IOException {
        BufferedReader reader = new BufferedReader(source);
        int lines = 0;
        while (reader.readLine() != null) {
            lines++;
        }
        return lines;
    }

    public boolean isEmpty(Reader source) throws IOException {
        try (BufferedReader reader = new BufferedReader(source)) {
            String first = reader.readLine();
            return first == null;
        }
    }
}
